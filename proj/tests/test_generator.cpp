#include <cmath>

#include "doctest.h"
#include "mlbs/baselines.hpp"
#include "mlbs/generator.hpp"
#include "mlbs/instance_io.hpp"

using namespace mlbs;

TEST_CASE("generated instances are valid and greedily coverable") {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    GeneratorConfig cfg;
    cfg.seed = seed;
    cfg.day_span = 300;
    const ProblemInstance inst = generate_instance(cfg);
    CHECK_NOTHROW(check_instance(inst));
    const auto r = compute_objectives(inst, greedy_schedule(inst));
    CHECK(r.n_uncovered == 0);
    CHECK(inst.fleet_size >= r.n_used);
  }
}

TEST_CASE("generation is deterministic per seed") {
  GeneratorConfig cfg;
  cfg.seed = 42;
  const auto a = instance_to_json(generate_instance(cfg));
  const auto b = instance_to_json(generate_instance(cfg));
  CHECK(a == b);
  cfg.seed = 43;
  CHECK(instance_to_json(generate_instance(cfg)) != a);
}

TEST_CASE("deletion fraction removes the right count") {
  GeneratorConfig cfg;
  cfg.seed = 10;
  cfg.deletion_fraction = 0.0;
  const ProblemInstance base = generate_instance(cfg);
  const int n = base.total_departures();

  const ProblemInstance same = derive_instance(base, 0.0, 99);
  CHECK(instance_to_json(same) == instance_to_json(base));

  const ProblemInstance derived = derive_instance(base, 0.3, 99);
  CHECK(derived.total_departures() ==
        static_cast<int>(std::lround((1.0 - 0.3) * n)));
  CHECK_NOTHROW(check_instance(derived));

  const ProblemInstance again = derive_instance(base, 0.3, 99);
  CHECK(instance_to_json(again) == instance_to_json(derived));
  const ProblemInstance other = derive_instance(base, 0.3, 100);
  CHECK(instance_to_json(other) != instance_to_json(derived));
}

TEST_CASE("line pairs share geometry") {
  GeneratorConfig cfg;
  cfg.seed = 3;
  cfg.n_line_pairs = 3;
  const ProblemInstance inst = generate_instance(cfg);
  REQUIRE(inst.lines.size() == 6);
  for (std::size_t i = 0; i + 1 < inst.lines.size(); i += 2) {
    const auto& fwd = inst.lines[i];
    const auto& rev = inst.lines[i + 1];
    CHECK(fwd.departure_cp == rev.terminal_cp);
    CHECK(fwd.terminal_cp == rev.departure_cp);
    CHECK(fwd.base_travel_time == rev.base_travel_time);
  }
}
