#pragma once

#include <vector>

#include "mlbs/model.hpp"

namespace mlbs::testing {

// Two CPs (0, 1) with one directed line each way, shared travel time.
inline ProblemInstance pair_instance(std::vector<Minute> deps_cp0,
                                     std::vector<Minute> deps_cp1,
                                     Minute travel, Minute deadhead,
                                     int fleet_cp0, int fleet_cp1,
                                     Minute r_min = 5, int n_s = 8) {
  ProblemInstance inst;
  inst.control_points = {{0, fleet_cp0}, {1, fleet_cp1}};
  inst.lines = {{0, 0, 1, travel}, {1, 1, 0, travel}};
  inst.timetables = {{0, std::move(deps_cp0)}, {1, std::move(deps_cp1)}};
  inst.deadhead_matrix = DeadheadMatrix({0, 1}, {0, deadhead, deadhead, 0});
  inst.r_min = r_min;
  inst.fleet_size = fleet_cp0 + fleet_cp1;
  inst.target_set_capacity = n_s;
  return inst;
}

// Four CPs, four lines (0->1, 1->0, 2->3, 3->2), uniform deadhead time.
inline ProblemInstance quad_instance(std::vector<Minute> deps_cp0,
                                     std::vector<Minute> deps_cp2,
                                     Minute travel, Minute deadhead, int fleet_cp0,
                                     int fleet_cp2, Minute r_min = 5,
                                     int n_s = 8) {
  ProblemInstance inst;
  inst.control_points = {{0, fleet_cp0}, {1, 0}, {2, fleet_cp2}, {3, 0}};
  inst.lines = {{0, 0, 1, travel}, {1, 1, 0, travel},
                {2, 2, 3, travel}, {3, 3, 2, travel}};
  inst.timetables = {{0, std::move(deps_cp0)}, {1, {}},
                     {2, std::move(deps_cp2)}, {3, {}}};
  std::vector<Minute> cells;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) cells.push_back(a == b ? 0 : deadhead);
  }
  inst.deadhead_matrix = DeadheadMatrix({0, 1, 2, 3}, std::move(cells));
  inst.r_min = r_min;
  inst.fleet_size = fleet_cp0 + fleet_cp2;
  inst.target_set_capacity = n_s;
  return inst;
}

}  // namespace mlbs::testing
