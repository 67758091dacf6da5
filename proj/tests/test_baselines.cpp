#include "doctest.h"
#include "helpers.hpp"
#include "mlbs/baselines.hpp"
#include "mlbs/generator.hpp"

using namespace mlbs;
using mlbs::testing::pair_instance;

TEST_CASE("brute force: chainable departure pair needs one bus") {
  // h = 40, r_min = 5; gap 50 > 45 allows one bus to chain via the return leg?
  // No return trips here: both departures are from CP0, so the bus must
  // deadhead back (10 min): 40 + 5 + 10 + 5 = 60 is the chainable threshold.
  auto chainable = pair_instance({400, 470}, {}, 40, 10, 1, 0);
  const auto best = brute_force_optimal(chainable);
  CHECK(best == ObjectiveReport{1, 10, 0});

  auto tight = pair_instance({400, 450}, {}, 40, 10, 2, 0);
  const auto forced = brute_force_optimal(tight);
  CHECK(forced.n_uncovered == 0);
  CHECK(forced.n_used == 2);
}

TEST_CASE("brute force refuses oversized instances") {
  std::vector<Minute> many;
  for (int i = 0; i < 13; ++i) many.push_back(400 + 30 * i);
  auto too_many_entries = pair_instance(many, {}, 40, 10, 2, 0);
  CHECK_THROWS_AS(brute_force_optimal(too_many_entries), std::invalid_argument);

  auto too_many_buses = pair_instance({400}, {}, 40, 10, 3, 2);
  CHECK_THROWS_AS(brute_force_optimal(too_many_buses), std::invalid_argument);
}

TEST_CASE("greedy chains when chaining is possible") {
  auto chainable = pair_instance({400, 470, 540}, {}, 40, 10, 1, 0);
  const Schedule s = greedy_schedule(chainable);
  CHECK(validate_schedule(chainable, s).empty());
  const auto r = compute_objectives(chainable, s);
  CHECK(r.n_used == 1);
  CHECK(r.n_uncovered == 0);
}

TEST_CASE("greedy on an empty fleet leaves everything uncovered") {
  auto inst = pair_instance({400, 460}, {}, 40, 10, 0, 0);
  const Schedule s = greedy_schedule(inst);
  CHECK(s.trips.empty());
  CHECK(compute_objectives(inst, s).n_uncovered == 2);
}

TEST_CASE("oracle suite: greedy coverage is exact, LNS close on tiny instances") {
  int n_checked = 0;
  for (int seed = 0; n_checked < 40 && seed < 200; ++seed) {
    GeneratorConfig cfg;
    cfg.n_line_pairs = 1;
    cfg.day_span = 150;
    cfg.headway_min = 30;
    cfg.headway_max = 50;
    cfg.travel_min = 20;
    cfg.travel_max = 35;
    cfg.seed = 9000 + static_cast<std::uint64_t>(seed);
    ProblemInstance inst;
    try {
      inst = generate_instance(cfg);
    } catch (const std::exception&) {
      continue;
    }
    if (inst.total_departures() > 12 || inst.fleet_size > 4) continue;
    ++n_checked;

    const Schedule g = greedy_schedule(inst);
    CHECK(validate_schedule(inst, g).empty());
    const auto go = compute_objectives(inst, g);
    const auto best = brute_force_optimal(inst);
    CHECK(go.n_uncovered == best.n_uncovered);
    CHECK(go.n_used <= best.n_used + 1);

    LnsConfig lc;
    lc.seed = static_cast<std::uint64_t>(seed);
    const Schedule l = lns_improve(inst, g, lc);
    CHECK(validate_schedule(inst, l).empty());
    const auto lo = compute_objectives(inst, l);
    CHECK(lo.lex_less_equal(go));       // monotone non-worsening
    CHECK(best.lex_less_equal(lo));     // never beats the exact optimum
  }
  CHECK(n_checked == 40);
}

TEST_CASE("lns is deterministic per seed") {
  GeneratorConfig cfg;
  cfg.seed = 321;
  const ProblemInstance inst = generate_instance(cfg);
  const Schedule g = greedy_schedule(inst);
  LnsConfig lc;
  lc.seed = 9;
  lc.iterations = 50;
  const Schedule a = lns_improve(inst, g, lc);
  const Schedule b = lns_improve(inst, g, lc);
  CHECK(compute_objectives(inst, a) == compute_objectives(inst, b));
  REQUIRE(a.trips.size() == b.trips.size());
}
