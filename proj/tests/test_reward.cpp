#include <random>

#include "doctest.h"
#include "mlbs/reward.hpp"

using namespace mlbs;

TEST_CASE("final_reward substitutions") {
  const RewardWeights w;
  CHECK(final_reward({46, 0, 0}, w) == doctest::Approx(-184.0).epsilon(1e-12));
  CHECK(final_reward({0, 0, 0}, w) == doctest::Approx(0.0));
  CHECK(final_reward({57, 921, 0}, w) == doctest::Approx(-320.1).epsilon(1e-12));
}

TEST_CASE("final_reward is decreasing in each objective") {
  const RewardWeights w;
  CHECK(final_reward({5, 100, 0}, w) > final_reward({6, 100, 0}, w));
  CHECK(final_reward({5, 100, 0}, w) > final_reward({5, 101, 0}, w));
}

TEST_CASE("rest_rank_reward") {
  CHECK(rest_rank_reward(true, 1, 4) == doctest::Approx(0.75));
  CHECK(rest_rank_reward(true, 4, 4) == doctest::Approx(0.0));
  CHECK(rest_rank_reward(false, 0, 0) == doctest::Approx(0.0));
  CHECK_THROWS_AS(rest_rank_reward(true, 1, 0), std::logic_error);
  CHECK_THROWS_AS(rest_rank_reward(true, 5, 4), std::logic_error);
  CHECK_THROWS_AS(rest_rank_reward(true, 0, 4), std::logic_error);
  // Strictly decreasing in rank at fixed N_o, bounded in [0, 1).
  for (int n = 1; n <= 6; ++n) {
    double prev = 1.0;
    for (int p = 1; p <= n; ++p) {
      const double r = rest_rank_reward(true, p, n);
      CHECK(r < prev);
      CHECK(r >= 0.0);
      CHECK(r < 1.0);
      prev = r;
    }
  }
}

TEST_CASE("demand_degree") {
  CHECK(demand_degree(10, 4) == doctest::Approx(2.0));
  CHECK(demand_degree(0, 7) == doctest::Approx(0.0));
  CHECK(demand_degree(7, 0) == doctest::Approx(7.0));
}

TEST_CASE("step_reward spot values") {
  const RewardWeights w;
  SUBCASE("best-ranked used v_p bus") {
    StepContext ctx;
    ctx.selected_used = true;
    ctx.rest_rank = 1;
    ctx.used_eligible = 4;
    ctx.used_bus_available = true;
    CHECK(step_reward(ctx, w) == doctest::Approx(1.5));
  }
  SUBCASE("unused bus chosen over a used one, with deadhead and bad demand") {
    StepContext ctx;
    ctx.selected_used = false;
    ctx.used_bus_available = true;
    ctx.deadhead = 12;
    ctx.is_deadhead_selection = true;
    ctx.demand_origin = 3.0;
    ctx.demand_terminal = 1.0;  // U_1 > U_2 -> r_u = 1
    CHECK(step_reward(ctx, w) == doctest::Approx(-6.2));
  }
  SUBCASE("online mode drops deadhead and demand terms") {
    StepContext ctx;
    ctx.selected_used = true;
    ctx.rest_rank = 2;
    ctx.used_eligible = 4;
    ctx.used_bus_available = true;
    ctx.mode = Mode::Online;
    ctx.deadhead = 12;  // must be ignored online
    ctx.is_deadhead_selection = true;
    ctx.demand_origin = 9.0;
    ctx.demand_terminal = 1.0;
    CHECK(step_reward(ctx, w) == doctest::Approx(1.0));
  }
  SUBCASE("r_n fires only when a used bus was available") {
    StepContext ctx;
    ctx.selected_used = false;
    ctx.used_bus_available = false;
    CHECK(step_reward(ctx, w) == doctest::Approx(0.0));
  }
}

TEST_CASE("step_reward matches an independent substitution oracle") {
  std::mt19937_64 rng(123);
  std::uniform_int_distribution<int> n_o(1, 12), k(0, 40), coin(0, 1);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  const RewardWeights w;
  for (int trial = 0; trial < 10000; ++trial) {
    StepContext ctx;
    ctx.used_eligible = n_o(rng);
    ctx.selected_used = coin(rng) == 1;
    ctx.rest_rank = ctx.selected_used
                        ? std::uniform_int_distribution<int>(1, ctx.used_eligible)(rng)
                        : 0;
    ctx.deadhead = k(rng);
    ctx.is_deadhead_selection = coin(rng) == 1;
    ctx.used_bus_available = ctx.selected_used || coin(rng) == 1;
    ctx.demand_origin = u(rng);
    ctx.demand_terminal = u(rng);
    ctx.mode = coin(rng) == 1 ? Mode::Online : Mode::Offline;

    // Literal Eqs. (4)-(6), written independently of the implementation.
    const bool online = ctx.mode == Mode::Online;
    const double r_n =
        (!ctx.selected_used && ctx.used_bus_available) ? 1.0 : 0.0;
    const double k_v = online ? 0.0 : static_cast<double>(ctx.deadhead);
    const double r_k =
        ctx.selected_used
            ? (ctx.used_eligible - ctx.rest_rank) /
                  static_cast<double>(ctx.used_eligible)
            : 0.0;
    const double r_u = (!online && ctx.is_deadhead_selection &&
                        ctx.demand_origin > ctx.demand_terminal)
                           ? 1.0
                           : 0.0;
    const double expect = -4.0 * r_n - 0.1 * k_v + 2.0 * r_k - 1.0 * r_u;
    CHECK(step_reward(ctx, w) == doctest::Approx(expect).epsilon(1e-9));
  }
}

TEST_CASE("best used selection beats any unused selection at default weights") {
  const RewardWeights w;
  StepContext best_used;
  best_used.selected_used = true;
  best_used.rest_rank = 1;
  best_used.used_eligible = 3;
  best_used.used_bus_available = true;
  const double used_r = step_reward(best_used, w);
  for (int k = 0; k <= 30; k += 10) {
    StepContext unused;
    unused.selected_used = false;
    unused.used_bus_available = true;
    unused.deadhead = k;
    unused.is_deadhead_selection = k > 0;
    unused.demand_origin = 5.0;
    unused.demand_terminal = 1.0;
    CHECK(used_r >= step_reward(unused, w));
  }
}
