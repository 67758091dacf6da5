#include "mlbs/online.hpp"

#include <algorithm>
#include <random>
#include <set>

namespace mlbs {

std::vector<DeadheadOrder> plan_deadheads(const Simulator& sim,
                                          const PolicyValueNet& offline_params,
                                          const TimeWindowConfig& window_cfg) {
  if (window_cfg.window_minutes <= 0) {
    throw std::invalid_argument("plan_deadheads: window must be positive");
  }
  std::vector<DeadheadOrder> orders;
  if (sim.done()) return orders;

  const Minute t_i = sim.clock();
  const std::size_t idx = sim.entry_index();
  const auto& entries = sim.combined().entries;
  const Minute t_next = idx + 1 < entries.size()
                            ? entries[idx + 1].minute
                            : 2 * kDayMinutes;  // no later decision point
  const Minute horizon = t_i + window_cfg.window_minutes;

  Simulator lookahead = sim;
  lookahead.set_mode(Mode::Offline);  // replay uses the integrated action space
  std::set<int> issued;

  while (!lookahead.done() && lookahead.current_entry().minute <= horizon) {
    const CombinedEntry entry = lookahead.current_entry();
    if (!lookahead.has_valid_action()) {
      lookahead.skip_uncovered();
      continue;
    }
    const int slot = argmax_action(offline_params, lookahead.observation().state,
                                   lookahead.observation().mask);
    const int bus_id = lookahead.slot_bus(slot);
    if (entry.minute > t_i) {
      const BusStatus& replay_bus =
          lookahead.buses()[static_cast<std::size_t>(bus_id)];
      if (replay_bus.location != kRunning && replay_bus.location != entry.cp_id) {
        const Minute k =
            sim.instance().deadhead_matrix.at(replay_bus.location, entry.cp_id);
        const Minute t_e = entry.minute - sim.instance().r_min - k;
        const BusStatus& live_bus = sim.buses()[static_cast<std::size_t>(bus_id)];
        if (t_e >= t_i && t_e < t_next && !issued.count(bus_id) &&
            live_bus.location == replay_bus.location &&
            live_bus.rest(t_i) >= sim.instance().r_min) {
          orders.push_back({bus_id, replay_bus.location, entry.cp_id, t_i, k,
                            entry.minute});
          issued.insert(bus_id);
        }
      }
    }
    lookahead.step(slot);
  }
  return orders;
}

StepOutcome online_step(Simulator& sim, const PolicyValueNet& online_params,
                        const PolicyValueNet& offline_params,
                        const TimeWindowConfig& window_cfg) {
  const auto orders = plan_deadheads(sim, offline_params, window_cfg);
  for (const auto& o : orders) {
    const BusStatus& b = sim.buses()[static_cast<std::size_t>(o.bus_id)];
    if (b.location == o.from_cp && b.rest(sim.clock()) >= sim.instance().r_min) {
      sim.dispatch_deadhead(o.bus_id, o.to_cp);
    }
  }
  if (sim.has_valid_action()) {
    const int slot = argmax_action(online_params, sim.observation().state,
                                   sim.observation().mask);
    return sim.step(slot);
  }
  return sim.skip_uncovered();
}

OnlineRunResult run_online(const ProblemInstance& instance,
                           const PolicyValueNet& online_params,
                           const PolicyValueNet& offline_params,
                           const TimeWindowConfig& window_cfg,
                           const SimOptions& opts) {
  Simulator sim(instance, Mode::Online, opts);
  OnlineRunResult result;
  while (!sim.done()) {
    auto orders = plan_deadheads(sim, offline_params, window_cfg);
    for (const auto& o : orders) {
      const BusStatus& b = sim.buses()[static_cast<std::size_t>(o.bus_id)];
      if (b.location == o.from_cp && b.rest(sim.clock()) >= instance.r_min) {
        sim.dispatch_deadhead(o.bus_id, o.to_cp);
        result.orders.push_back(o);
      }
    }
    if (sim.has_valid_action()) {
      sim.step(argmax_action(online_params, sim.observation().state,
                             sim.observation().mask));
    } else {
      sim.skip_uncovered();
    }
  }
  result.schedule = sim.schedule();
  result.report = compute_objectives(instance, result.schedule);
  return result;
}

TrainResult train_online(const ProblemInstance& instance,
                         const PolicyValueNet& offline_params,
                         const OnlineTrainConfig& cfg) {
  const int n_cps = static_cast<int>(instance.control_points.size());
  const int dim = state_dimension(n_cps, instance.target_set_capacity);

  TrainResult result;
  result.net = PolicyValueNet(dim, instance.target_set_capacity, cfg.seed);
  AdamState adam = make_adam_state(result.net);
  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);

  const CombinedTimetable combined = merge_timetables(instance);
  const Minute day_start = combined.entries.front().minute;
  const Minute day_end = combined.entries.back().minute;

  int episodes_done = 0;
  while (episodes_done < cfg.episodes) {
    const int n =
        std::min(cfg.hp.episodes_per_iteration, cfg.episodes - episodes_done);
    std::vector<Trajectory> batch;
    for (int e = 0; e < n; ++e) {
      ProblemInstance scenario = instance;
      scenario.overrides.clear();
      if (cfg.randomize_disruptions) {
        switch (std::uniform_int_distribution<int>(0, 2)(rng)) {
          case 0:
            break;  // undisrupted episode
          case 1: {
            const Minute span = std::max(1, day_end - day_start);
            const Minute start =
                day_start + std::uniform_int_distribution<Minute>(0, span)(rng);
            scenario.overrides.push_back(
                {-1, start, start + cfg.disruption_window, cfg.disruption_extra});
            break;
          }
          case 2: {
            const int line = instance
                                 .lines[std::uniform_int_distribution<std::size_t>(
                                     0, instance.lines.size() - 1)(rng)]
                                 .id;
            scenario.overrides.push_back(
                {line, 0, kDayMinutes, cfg.disruption_extra});
            break;
          }
        }
      }
      SimOptions opts = cfg.sim;
      opts.apply_overrides = true;
      Simulator sim(scenario, Mode::Online, opts);
      Trajectory traj;
      while (!sim.done()) {
        auto orders = plan_deadheads(sim, offline_params, cfg.window);
        for (const auto& o : orders) {
          const BusStatus& b = sim.buses()[static_cast<std::size_t>(o.bus_id)];
          if (b.location == o.from_cp &&
              b.rest(sim.clock()) >= scenario.r_min) {
            sim.dispatch_deadhead(o.bus_id, o.to_cp);
          }
        }
        traj.states.push_back(sim.observation().state);
        traj.masks.push_back(sim.observation().mask);
        StepOutcome out;
        if (sim.has_valid_action()) {
          double prob = 1.0;
          const int slot = sample_action(result.net, sim.observation().state,
                                         sim.observation().mask, rng, &prob);
          traj.actions.push_back(slot);
          traj.behavior_probs.push_back(prob);
          out = sim.step(slot);
        } else {
          traj.actions.push_back(-1);
          traj.behavior_probs.push_back(1.0);
          out = sim.skip_uncovered();
        }
        traj.rewards.push_back(out.reward);
        traj.dones.push_back(out.done ? 1 : 0);
      }
      result.curve.push_back(traj.total_reward());
      postprocess_trajectory(traj, result.net, cfg.hp.gamma);
      batch.push_back(std::move(traj));
    }
    ppo_update(result.net, adam, batch, cfg.hp);
    episodes_done += n;
  }
  return result;
}

}  // namespace mlbs
