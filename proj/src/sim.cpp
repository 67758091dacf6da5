#include "mlbs/sim.hpp"

#include <algorithm>
#include <stdexcept>

namespace mlbs {

Simulator::Simulator(const ProblemInstance& instance, Mode mode, SimOptions opts)
    : instance_(&instance), mode_(mode), opts_(opts) {
  check_instance(instance);
  combined_ = merge_timetables(instance);
  if (combined_.empty()) {
    throw std::invalid_argument("simulator: instance has an empty combined timetable");
  }
  const Minute t0 = combined_.entries.front().minute;
  int next_id = 0;
  for (const auto& cp : instance.control_points) {
    for (int i = 0; i < cp.initial_bus_count; ++i) {
      BusStatus b;
      b.bus_id = next_id++;
      b.used = false;
      b.location = cp.id;
      // Unused buses are eligible from the first decision point onward.
      b.last_arrival = t0 - instance.r_min;
      buses_.push_back(b);
    }
  }
  schedule_.covered_by.assign(combined_.size(), -1);
  prepare_observation();
}

const CombinedEntry& Simulator::current_entry() const {
  if (done_) throw std::logic_error("simulator: episode finished");
  return combined_.entries[idx_];
}

Minute Simulator::travel_time(int line_id, Minute depart) const {
  if (opts_.apply_overrides) {
    return effective_travel_time(*instance_, line_id, depart);
  }
  return instance_->line(line_id).base_travel_time;
}

BusStatus& Simulator::bus(int bus_id) {
  return buses_[static_cast<std::size_t>(bus_id)];
}

void Simulator::prepare_observation() {
  const CombinedEntry& entry = combined_.entries[idx_];
  clock_ = entry.minute;
  cps_ = cp_features(buses_, *instance_, combined_, clock_);
  classify_buses(buses_, *instance_, entry, clock_, mode_, &v_p_raw_, &v_q_raw_);

  if (opts_.screening_enabled) {
    screening_ = build_target_set(buses_, *instance_, entry, clock_, v_p_raw_,
                                  v_q_raw_, instance_->target_set_capacity);
    obs_.state = build_state(buses_, *instance_, cps_, entry, clock_, screening_);
    obs_.mask.assign(screening_.target_set.size(), 0);
    for (std::size_t i = 0; i < screening_.target_set.size(); ++i) {
      obs_.mask[i] = screening_.target_set[i] != kSentinel ? 1 : 0;
    }
  } else {
    screening_ = ScreeningResult{};
    screening_.v_p = v_p_raw_;
    screening_.v_q = v_q_raw_;
    // One slot per bus, id order; eligibility becomes the mask.
    screening_.target_set.resize(buses_.size());
    for (std::size_t i = 0; i < buses_.size(); ++i) {
      screening_.target_set[i] = buses_[i].bus_id;
    }
    obs_.state = build_state_unscreened(buses_, *instance_, cps_, entry, clock_);
    obs_.mask.assign(buses_.size(), 0);
    for (int id : v_p_raw_) obs_.mask[static_cast<std::size_t>(id)] = 1;
    for (int id : v_q_raw_) obs_.mask[static_cast<std::size_t>(id)] = 1;
  }
}

bool Simulator::has_valid_action() const {
  return std::any_of(obs_.mask.begin(), obs_.mask.end(),
                     [](std::uint8_t m) { return m != 0; });
}

int Simulator::slot_bus(int action_slot) const {
  if (action_slot < 0 ||
      action_slot >= static_cast<int>(screening_.target_set.size())) {
    return kSentinel;
  }
  return screening_.target_set[static_cast<std::size_t>(action_slot)];
}

StepOutcome Simulator::advance(double reward) {
  if (opts_.final_reward_only) reward = 0.0;
  ++idx_;
  StepOutcome out;
  out.uncovered_total = uncovered_;
  if (idx_ >= combined_.size()) {
    done_ = true;
    reward += final_reward(compute_objectives(*instance_, schedule_), opts_.weights);
  } else {
    prepare_observation();
    out.next = obs_;
  }
  out.reward = reward;
  out.done = done_;
  return out;
}

StepOutcome Simulator::step(int action_slot) {
  if (done_) throw std::logic_error("simulator: step after episode end");
  if (action_slot < 0 ||
      action_slot >= static_cast<int>(obs_.mask.size()) ||
      obs_.mask[static_cast<std::size_t>(action_slot)] == 0) {
    throw std::logic_error("simulator: action slot " +
                           std::to_string(action_slot) + " is masked");
  }
  return apply_bus(slot_bus(action_slot));
}

bool Simulator::bus_eligible(int bus_id) const {
  return std::find(v_p_raw_.begin(), v_p_raw_.end(), bus_id) != v_p_raw_.end() ||
         std::find(v_q_raw_.begin(), v_q_raw_.end(), bus_id) != v_q_raw_.end();
}

StepOutcome Simulator::step_bus(int bus_id) {
  if (done_) throw std::logic_error("simulator: step after episode end");
  if (!bus_eligible(bus_id)) {
    throw std::logic_error("simulator: bus " + std::to_string(bus_id) +
                           " is not eligible for the current entry");
  }
  return apply_bus(bus_id);
}

StepOutcome Simulator::apply_bus(int bus_id) {
  const CombinedEntry entry = combined_.entries[idx_];
  BusStatus& b = bus(bus_id);

  const bool from_v_q = b.location != entry.cp_id;
  StepContext ctx;
  ctx.mode = mode_;
  ctx.selected_used = b.used;
  ctx.is_deadhead_selection = from_v_q;

  // Used eligible population for the rank reward: v_p (plus v_q offline),
  // descending rest with bus-id tie-break.
  std::vector<int> used_eligible;
  for (int id : v_p_raw_) {
    if (buses_[static_cast<std::size_t>(id)].used) used_eligible.push_back(id);
  }
  if (mode_ == Mode::Offline) {
    for (int id : v_q_raw_) {
      if (buses_[static_cast<std::size_t>(id)].used) used_eligible.push_back(id);
    }
  }
  std::sort(used_eligible.begin(), used_eligible.end(), [&](int x, int y) {
    const Minute rx = buses_[static_cast<std::size_t>(x)].rest(clock_);
    const Minute ry = buses_[static_cast<std::size_t>(y)].rest(clock_);
    if (rx != ry) return rx > ry;
    return x < y;
  });
  ctx.used_eligible = static_cast<int>(used_eligible.size());
  ctx.used_bus_available = !used_eligible.empty();
  if (b.used) {
    const auto it = std::find(used_eligible.begin(), used_eligible.end(), bus_id);
    ctx.rest_rank = static_cast<int>(it - used_eligible.begin()) + 1;
  }

  Minute k = 0;
  if (from_v_q) {
    k = instance_->deadhead_matrix.at(b.location, entry.cp_id);
    ctx.deadhead = k;
    for (const auto& f : cps_) {
      if (f.cp_id == b.location) ctx.demand_origin = demand_degree(f.n_short, f.n_used);
      if (f.cp_id == instance_->line(entry.line_id).terminal_cp) {
        ctx.demand_terminal = demand_degree(f.n_short, f.n_used);
      }
    }
    // Deadhead departs as early as the rest constraint permits.
    const Minute dh_depart = b.last_arrival + instance_->r_min;
    schedule_.trips.push_back({bus_id, TripKind::Deadhead, -1, b.location,
                               entry.cp_id, dh_depart, dh_depart + k});
  }

  const Minute tt = travel_time(entry.line_id, entry.minute);
  const BusLine& line = instance_->line(entry.line_id);
  schedule_.trips.push_back({bus_id, TripKind::Service, entry.line_id,
                             entry.cp_id, line.terminal_cp, entry.minute,
                             entry.minute + tt});
  schedule_.covered_by[idx_] = bus_id;

  b.used = true;
  b.location = line.terminal_cp;
  b.last_arrival = entry.minute + tt;

  return advance(step_reward(ctx, opts_.weights));
}

StepOutcome Simulator::skip_uncovered() {
  if (done_) throw std::logic_error("simulator: skip after episode end");
  if (has_valid_action()) {
    throw std::logic_error("simulator: skip_uncovered while eligible buses exist");
  }
  ++uncovered_;
  return advance(-opts_.weights.w1_step);
}

void Simulator::dispatch_deadhead(int bus_id, int to_cp) {
  BusStatus& b = bus(bus_id);
  if (b.location == kRunning) {
    throw std::logic_error("dispatch_deadhead: bus " + std::to_string(bus_id) +
                           " is running");
  }
  if (b.location == to_cp) {
    throw std::logic_error("dispatch_deadhead: bus " + std::to_string(bus_id) +
                           " is already at cp " + std::to_string(to_cp));
  }
  if (b.rest(clock_) < instance_->r_min) {
    throw std::logic_error("dispatch_deadhead: bus " + std::to_string(bus_id) +
                           " has not rested");
  }
  const Minute k = instance_->deadhead_matrix.at(b.location, to_cp);
  schedule_.trips.push_back(
      {bus_id, TripKind::Deadhead, -1, b.location, to_cp, clock_, clock_ + k});
  b.location = to_cp;
  b.last_arrival = clock_ + k;
  // Refresh the observation: the dispatched bus left the current CP's pool.
  prepare_observation();
}

void Simulator::set_mode(Mode mode) {
  if (mode_ == mode) return;
  mode_ = mode;
  if (!done_) prepare_observation();
}

std::uint64_t Simulator::state_hash() const {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](std::uint64_t v) {
    h ^= v;
    h *= 1099511628211ull;
  };
  mix(idx_);
  mix(static_cast<std::uint64_t>(uncovered_));
  mix(schedule_.trips.size());
  for (const auto& b : buses_) {
    mix(static_cast<std::uint64_t>(b.bus_id));
    mix(b.used ? 1 : 0);
    mix(static_cast<std::uint64_t>(b.location + 2));
    mix(static_cast<std::uint64_t>(b.last_arrival + 4096));
  }
  for (const auto& t : schedule_.trips) {
    mix(static_cast<std::uint64_t>(t.bus_id));
    mix(t.kind == TripKind::Service ? 7 : 11);
    mix(static_cast<std::uint64_t>(t.depart + 4096));
    mix(static_cast<std::uint64_t>(t.arrive + 4096));
  }
  return h;
}

double Trajectory::total_reward() const {
  double s = 0.0;
  for (double r : rewards) s += r;
  return s;
}

EpisodeResult run_episode(const ProblemInstance& instance, const PolicyFn& policy,
                          Mode mode, SimOptions opts) {
  Simulator sim(instance, mode, opts);
  EpisodeResult result;
  while (!sim.done()) {
    result.trajectory.states.push_back(sim.observation().state);
    result.trajectory.masks.push_back(sim.observation().mask);
    StepOutcome out;
    if (sim.has_valid_action()) {
      const int slot = policy(sim.observation().state, sim.observation().mask);
      result.trajectory.actions.push_back(slot);
      out = sim.step(slot);
    } else {
      result.trajectory.actions.push_back(-1);
      out = sim.skip_uncovered();
    }
    result.trajectory.behavior_probs.push_back(1.0);
    result.trajectory.rewards.push_back(out.reward);
    result.trajectory.dones.push_back(out.done ? 1 : 0);
  }
  result.schedule = sim.schedule();
  result.report = compute_objectives(instance, result.schedule);
  return result;
}

}  // namespace mlbs
