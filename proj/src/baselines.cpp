#include "mlbs/baselines.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <stdexcept>

namespace mlbs {

namespace {

int first_valid_slot(const std::vector<std::uint8_t>& mask) {
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) return static_cast<int>(i);
  }
  return -1;
}

}  // namespace

Schedule greedy_schedule(const ProblemInstance& instance) {
  Simulator sim(instance, Mode::Offline);
  while (!sim.done()) {
    const int slot = first_valid_slot(sim.observation().mask);
    if (slot >= 0) {
      sim.step(slot);
    } else {
      sim.skip_uncovered();
    }
  }
  return sim.schedule();
}

Schedule lns_improve(const ProblemInstance& instance, const Schedule& initial,
                     const LnsConfig& cfg) {
  if (cfg.iterations < 1) throw std::invalid_argument("lns: iterations must be >= 1");
  if (cfg.destroy_fraction <= 0.0 || cfg.destroy_fraction >= 1.0) {
    throw std::invalid_argument("lns: destroy_fraction must be in (0,1)");
  }
  std::mt19937_64 rng(cfg.seed);
  Schedule best = initial;
  ObjectiveReport best_report = compute_objectives(instance, best);

  for (int it = 0; it < cfg.iterations; ++it) {
    std::set<int> used;
    for (const auto& t : best.trips) {
      if (t.kind == TripKind::Service) used.insert(t.bus_id);
    }
    if (used.empty()) break;
    std::vector<int> used_ids(used.begin(), used.end());
    std::shuffle(used_ids.begin(), used_ids.end(), rng);
    const int destroy_count = std::max(
        1, static_cast<int>(cfg.destroy_fraction * static_cast<double>(used_ids.size())));
    std::set<int> destroyed(used_ids.begin(), used_ids.begin() + destroy_count);

    // Repair: replay, keeping surviving assignments where still feasible.
    Simulator sim(instance, Mode::Offline);
    while (!sim.done()) {
      const std::size_t i = sim.entry_index();
      const int kept = i < best.covered_by.size() ? best.covered_by[i] : -1;
      if (kept >= 0 && !destroyed.count(kept) && sim.bus_eligible(kept)) {
        sim.step_bus(kept);
        continue;
      }
      const int slot = first_valid_slot(sim.observation().mask);
      if (slot >= 0) {
        sim.step(slot);
      } else {
        sim.skip_uncovered();
      }
    }
    const ObjectiveReport candidate_report =
        compute_objectives(instance, sim.schedule());
    if (candidate_report.lex_less(best_report)) {
      best = sim.schedule();
      best_report = candidate_report;
    }
  }
  return best;
}

namespace {

struct BfBus {
  bool used = false;
  int location = 0;
  Minute last_arrival = 0;
};

struct BfSearch {
  const ProblemInstance* instance;
  const CombinedTimetable* combined;
  std::vector<BfBus> buses;
  ObjectiveReport best{0, 0, 0};
  bool have_best = false;

  void search(std::size_t idx, ObjectiveReport partial) {
    if (have_best && !partial.lex_less(best)) return;  // components only grow
    if (idx == combined->size()) {
      best = partial;
      have_best = true;
      return;
    }
    const CombinedEntry& e = combined->entries[idx];
    const BusLine& line = instance->line(e.line_id);
    const Minute now = e.minute;
    const Minute r_min = instance->r_min;

    // Candidate buses; unused ones are interchangeable per location, so only
    // the lowest id at each location is expanded.
    std::set<int> seen_unused_locations;
    for (std::size_t b = 0; b < buses.size(); ++b) {
      BfBus& bus = buses[b];
      const Minute rest = now - bus.last_arrival;
      Minute k = 0;
      bool feasible = false;
      if (bus.location == e.cp_id) {
        feasible = rest >= r_min && bus.last_arrival <= now;
      } else {
        k = instance->deadhead_matrix.at(bus.location, e.cp_id);
        feasible = k > 0 && rest > k + r_min;
      }
      if (!feasible) continue;
      if (!bus.used) {
        if (!seen_unused_locations.insert(bus.location).second) continue;
      }
      const BfBus saved = bus;
      ObjectiveReport next = partial;
      if (!bus.used) ++next.n_used;
      next.deadhead_total += k;
      bus.used = true;
      bus.location = line.terminal_cp;
      bus.last_arrival = now + line.base_travel_time;
      search(idx + 1, next);
      bus = saved;
    }

    ObjectiveReport skipped = partial;
    ++skipped.n_uncovered;
    search(idx + 1, skipped);
  }
};

}  // namespace

ObjectiveReport brute_force_optimal(const ProblemInstance& instance) {
  const CombinedTimetable combined = merge_timetables(instance);
  if (combined.size() > 12 || instance.fleet_size > 4) {
    throw std::invalid_argument(
        "brute_force_optimal: instance too large (needs <= 12 entries, <= 4 buses)");
  }
  BfSearch s;
  s.instance = &instance;
  s.combined = &combined;
  const Minute t0 = combined.empty() ? 0 : combined.entries.front().minute;
  for (const auto& cp : instance.control_points) {
    for (int i = 0; i < cp.initial_bus_count; ++i) {
      s.buses.push_back({false, cp.id, t0 - instance.r_min});
    }
  }
  s.search(0, ObjectiveReport{0, 0, 0});
  return s.best;
}

}  // namespace mlbs
