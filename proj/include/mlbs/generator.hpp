#pragma once

#include <cstdint>

#include "mlbs/model.hpp"

namespace mlbs {

struct GeneratorConfig {
  int n_line_pairs = 2;        // each pair is two directed lines over one CP pair
  int day_start = 360;         // first possible departure minute
  int day_span = 600;          // timetables cover [day_start, day_start + span)
  Minute headway_min = 15;
  Minute headway_max = 40;
  Minute travel_min = 30;
  Minute travel_max = 60;
  Minute deadhead_min = 8;
  Minute deadhead_max = 25;
  Minute r_min = 5;
  int target_set_capacity = 8;
  double deletion_fraction = 0.0;
  int fleet_margin = 1;  // spare buses beyond what greedy coverage needs
  std::uint64_t seed = 0;
};

// Regular timetables from headway draws, random deletion, fleet sized (with
// retries) so the greedy baseline covers every departure.
ProblemInstance generate_instance(const GeneratorConfig& cfg);

// Removes round(fraction * N) combined entries uniformly at random.
ProblemInstance derive_instance(const ProblemInstance& base,
                                double deletion_fraction, std::uint64_t seed);

}  // namespace mlbs
