#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "mlbs/model.hpp"
#include "mlbs/reward.hpp"
#include "mlbs/screening.hpp"

namespace mlbs {

struct SimOptions {
  bool apply_overrides = false;   // online runs consume travel_time_overrides
  bool screening_enabled = true;  // off = ablation mode, bus block covers fleet
  bool final_reward_only = false;  // suppress step rewards, keep episode-end term
  RewardWeights weights;
};

struct Observation {
  StateVector state;
  std::vector<std::uint8_t> mask;  // 1 = selectable slot
};

struct StepOutcome {
  Observation next;  // meaningful only when !done
  double reward = 0.0;
  bool done = false;
  int uncovered_total = 0;
};

// One decision point per combined-timetable entry. Copyable: online lookahead
// clones the whole simulator. The ProblemInstance outlives every simulator.
class Simulator {
 public:
  Simulator(const ProblemInstance& instance, Mode mode, SimOptions opts = {});

  const Observation& observation() const { return obs_; }
  bool has_valid_action() const;
  bool done() const { return done_; }

  // Applies the bus in the given target-set slot to the current entry.
  StepOutcome step(int action_slot);
  // Applies a specific eligible bus, bypassing target-set truncation
  // (baseline schedulers re-inserting a known assignment).
  StepOutcome step_bus(int bus_id);
  bool bus_eligible(int bus_id) const;
  // Marks the current entry uncovered; only legal when no slot is valid.
  StepOutcome skip_uncovered();

  // Online phase: send a bus on a deadhead departing at the current clock.
  void dispatch_deadhead(int bus_id, int to_cp);

  // Switches the action-space rules and re-screens the current entry; used on
  // lookahead clones that replay offline decisions.
  void set_mode(Mode mode);

  const ProblemInstance& instance() const { return *instance_; }
  const CombinedTimetable& combined() const { return combined_; }
  const CombinedEntry& current_entry() const;
  Minute clock() const { return clock_; }
  std::size_t entry_index() const { return idx_; }
  Mode mode() const { return mode_; }
  const SimOptions& options() const { return opts_; }
  const Schedule& schedule() const { return schedule_; }
  const std::vector<BusStatus>& buses() const { return buses_; }
  const ScreeningResult& screening() const { return screening_; }
  const std::vector<CpFeatures>& cp_feats() const { return cps_; }
  int uncovered() const { return uncovered_; }

  // Resolves an action slot to a bus id (kSentinel if the slot is empty).
  int slot_bus(int action_slot) const;

  std::uint64_t state_hash() const;

 private:
  Minute travel_time(int line_id, Minute depart) const;
  void prepare_observation();
  StepOutcome apply_bus(int bus_id);
  StepOutcome advance(double reward);
  BusStatus& bus(int bus_id);

  const ProblemInstance* instance_;
  Mode mode_;
  SimOptions opts_;
  CombinedTimetable combined_;
  std::vector<BusStatus> buses_;
  Schedule schedule_;
  std::size_t idx_ = 0;
  Minute clock_ = 0;
  int uncovered_ = 0;
  bool done_ = false;

  Observation obs_;
  ScreeningResult screening_;
  std::vector<CpFeatures> cps_;
  std::vector<int> v_p_raw_;
  std::vector<int> v_q_raw_;
};

struct Trajectory {
  std::vector<StateVector> states;
  std::vector<std::vector<std::uint8_t>> masks;
  std::vector<int> actions;          // chosen slot, -1 for skipped entries
  std::vector<double> behavior_probs;  // probability used at sampling time
  std::vector<double> rewards;
  std::vector<std::uint8_t> dones;
  std::vector<double> rewards_to_go;
  std::vector<double> advantages;

  std::size_t size() const { return rewards.size(); }
  double total_reward() const;
};

using PolicyFn =
    std::function<int(const StateVector&, const std::vector<std::uint8_t>&)>;

struct EpisodeResult {
  Schedule schedule;
  ObjectiveReport report;
  Trajectory trajectory;
};

EpisodeResult run_episode(const ProblemInstance& instance, const PolicyFn& policy,
                          Mode mode, SimOptions opts = {});

}  // namespace mlbs
