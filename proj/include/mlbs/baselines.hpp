#pragma once

#include <cstdint>

#include "mlbs/model.hpp"
#include "mlbs/sim.hpp"

namespace mlbs {

struct LnsConfig {
  int iterations = 200;
  double destroy_fraction = 0.3;  // fraction of used buses removed per round
  std::uint64_t seed = 0;
};

// At every entry, takes the top bus of the offline screening priority order.
Schedule greedy_schedule(const ProblemInstance& instance);

// Destroy-and-repair: drops the trips of a random bus subset, greedily
// reinserts, keeps the result iff (N_d, N_u, T_d) improves lexicographically.
Schedule lns_improve(const ProblemInstance& instance, const Schedule& initial,
                     const LnsConfig& cfg);

// Exhaustive lexicographic optimum over (N_d, N_u, T_d). Refuses instances
// with more than 12 combined entries or more than 4 buses.
ObjectiveReport brute_force_optimal(const ProblemInstance& instance);

}  // namespace mlbs
