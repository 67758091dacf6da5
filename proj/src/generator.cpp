#include "mlbs/generator.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>

#include "mlbs/baselines.hpp"

namespace mlbs {

namespace {

void delete_entries(std::vector<Timetable>& timetables, double fraction,
                    std::mt19937_64& rng) {
  if (fraction <= 0.0) return;
  std::vector<std::pair<int, int>> slots;  // (timetable index, departure index)
  for (std::size_t t = 0; t < timetables.size(); ++t) {
    for (std::size_t d = 0; d < timetables[t].departures.size(); ++d) {
      slots.emplace_back(static_cast<int>(t), static_cast<int>(d));
    }
  }
  const int total = static_cast<int>(slots.size());
  const int keep = static_cast<int>(std::lround((1.0 - fraction) * total));
  const int remove = total - keep;
  std::shuffle(slots.begin(), slots.end(), rng);
  std::vector<std::vector<bool>> dead(timetables.size());
  for (std::size_t t = 0; t < timetables.size(); ++t) {
    dead[t].assign(timetables[t].departures.size(), false);
  }
  for (int i = 0; i < remove; ++i) {
    dead[static_cast<std::size_t>(slots[i].first)]
        [static_cast<std::size_t>(slots[i].second)] = true;
  }
  for (std::size_t t = 0; t < timetables.size(); ++t) {
    std::vector<Minute> kept;
    for (std::size_t d = 0; d < timetables[t].departures.size(); ++d) {
      if (!dead[t][d]) kept.push_back(timetables[t].departures[d]);
    }
    timetables[t].departures = std::move(kept);
  }
}

// Distribute fleet over CPs proportionally to their departure counts.
void distribute_fleet(ProblemInstance& inst, int fleet) {
  std::vector<int> weights;
  int total_weight = 0;
  for (const auto& cp : inst.control_points) {
    int w = 1;
    for (const auto& tt : inst.timetables) {
      if (tt.cp_id == cp.id) w += static_cast<int>(tt.departures.size());
    }
    weights.push_back(w);
    total_weight += w;
  }
  int assigned = 0;
  for (std::size_t i = 0; i < inst.control_points.size(); ++i) {
    const int share = fleet * weights[i] / total_weight;
    inst.control_points[i].initial_bus_count = share;
    assigned += share;
  }
  for (std::size_t i = 0; assigned < fleet; i = (i + 1) % inst.control_points.size()) {
    ++inst.control_points[i].initial_bus_count;
    ++assigned;
  }
  inst.fleet_size = fleet;
}

}  // namespace

ProblemInstance generate_instance(const GeneratorConfig& cfg) {
  if (cfg.n_line_pairs < 1 || cfg.headway_min <= 0 ||
      cfg.headway_max < cfg.headway_min || cfg.travel_min <= 0 ||
      cfg.travel_max < cfg.travel_min || cfg.deadhead_min < 0 ||
      cfg.deadhead_max < cfg.deadhead_min || cfg.day_span <= 0 ||
      cfg.deletion_fraction < 0.0 || cfg.deletion_fraction >= 1.0) {
    throw std::invalid_argument("generator: invalid configuration");
  }
  std::mt19937_64 rng(cfg.seed);
  ProblemInstance inst;
  inst.r_min = cfg.r_min;
  inst.target_set_capacity = cfg.target_set_capacity;

  std::uniform_int_distribution<Minute> headway(cfg.headway_min, cfg.headway_max);
  std::uniform_int_distribution<Minute> travel(cfg.travel_min, cfg.travel_max);
  std::uniform_int_distribution<Minute> deadhead(cfg.deadhead_min, cfg.deadhead_max);

  const int n_cps = 2 * cfg.n_line_pairs;
  for (int c = 0; c < n_cps; ++c) inst.control_points.push_back({c, 0});

  for (int p = 0; p < cfg.n_line_pairs; ++p) {
    const int cp_a = 2 * p;
    const int cp_b = 2 * p + 1;
    const Minute h = travel(rng);
    inst.lines.push_back({2 * p, cp_a, cp_b, h});
    inst.lines.push_back({2 * p + 1, cp_b, cp_a, h});
    for (int cp : {cp_a, cp_b}) {
      Timetable tt;
      tt.cp_id = cp;
      Minute m = cfg.day_start +
                 std::uniform_int_distribution<Minute>(0, cfg.headway_max - 1)(rng);
      const Minute end = cfg.day_start + cfg.day_span;
      while (m < end && m < kDayMinutes) {
        tt.departures.push_back(m);
        m += headway(rng);
      }
      inst.timetables.push_back(std::move(tt));
    }
  }
  delete_entries(inst.timetables, cfg.deletion_fraction, rng);

  std::vector<Minute> cells;
  for (int i = 0; i < n_cps; ++i) {
    for (int j = 0; j < n_cps; ++j) {
      cells.push_back(i == j ? 0 : deadhead(rng));
    }
  }
  std::vector<int> cp_ids(static_cast<std::size_t>(n_cps));
  std::iota(cp_ids.begin(), cp_ids.end(), 0);
  inst.deadhead_matrix = DeadheadMatrix(cp_ids, cells);

  // Grow the fleet until greedy covers everything.
  const int total = inst.total_departures();
  if (total == 0) {
    throw std::runtime_error("generator: configuration produced no departures");
  }
  int fleet = std::max(1, total / 8);
  for (int attempt = 0; attempt < 64; ++attempt) {
    distribute_fleet(inst, fleet);
    const Schedule s = greedy_schedule(inst);
    const ObjectiveReport r = compute_objectives(inst, s);
    if (r.n_uncovered == 0) {
      distribute_fleet(inst, r.n_used + cfg.fleet_margin);
      const ObjectiveReport check =
          compute_objectives(inst, greedy_schedule(inst));
      if (check.n_uncovered == 0) {
        check_instance(inst);
        return inst;
      }
      // Margin trimming changed the distribution; fall through and regrow.
    }
    fleet = std::min(total, fleet + std::max(1, fleet / 2));
    if (fleet >= total) {
      distribute_fleet(inst, total);
      if (compute_objectives(inst, greedy_schedule(inst)).n_uncovered == 0) {
        check_instance(inst);
        return inst;
      }
      break;
    }
  }
  throw std::runtime_error("generator: could not size a fleet that greedy covers");
}

ProblemInstance derive_instance(const ProblemInstance& base,
                                double deletion_fraction, std::uint64_t seed) {
  if (deletion_fraction < 0.0 || deletion_fraction >= 1.0) {
    throw std::invalid_argument("derive: deletion_fraction must be in [0,1)");
  }
  ProblemInstance derived = base;
  std::mt19937_64 rng(seed);
  delete_entries(derived.timetables, deletion_fraction, rng);
  return derived;
}

}  // namespace mlbs
