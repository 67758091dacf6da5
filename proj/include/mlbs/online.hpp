#pragma once

#include "mlbs/ppo.hpp"
#include "mlbs/sim.hpp"

namespace mlbs {

struct TimeWindowConfig {
  Minute window_minutes = 60;  // lookahead W past the current departure
};

struct DeadheadOrder {
  int bus_id = 0;
  int from_cp = 0;
  int to_cp = 0;
  Minute dispatch_minute = 0;   // current departure time t_i
  Minute deadhead_minutes = 0;  // k^v
  Minute triggering_entry = 0;  // future departure t_j that wants the bus
};

// Replays offline argmax decisions over entries in (t_i, t_i + W]; every v_q
// selection whose latest start t_j - r_min - k^v falls in [t_i, t_{i+1})
// becomes an order dispatched now. The live simulator is never mutated.
std::vector<DeadheadOrder> plan_deadheads(const Simulator& sim,
                                          const PolicyValueNet& offline_params,
                                          const TimeWindowConfig& window_cfg);

// Executes pending deadhead orders, then picks a bus for the current entry
// with the online policy (v_p only).
StepOutcome online_step(Simulator& sim, const PolicyValueNet& online_params,
                        const PolicyValueNet& offline_params,
                        const TimeWindowConfig& window_cfg);

struct OnlineRunResult {
  Schedule schedule;
  ObjectiveReport report;
  std::vector<DeadheadOrder> orders;
};

OnlineRunResult run_online(const ProblemInstance& instance,
                           const PolicyValueNet& online_params,
                           const PolicyValueNet& offline_params,
                           const TimeWindowConfig& window_cfg,
                           const SimOptions& opts);

struct OnlineTrainConfig {
  Hyperparams hp;
  SimOptions sim;
  TimeWindowConfig window;
  int episodes = 500;
  std::uint64_t seed = 0;
  // Per-episode scenario draw: none / global window +15 / one line all day +15.
  bool randomize_disruptions = true;
  Minute disruption_extra = 15;
  Minute disruption_window = 190;
};

// Trains the online bus-selection policy; the frozen offline policy supplies
// deadhead decisions during rollouts.
TrainResult train_online(const ProblemInstance& instance,
                         const PolicyValueNet& offline_params,
                         const OnlineTrainConfig& cfg);

}  // namespace mlbs
