#pragma once

#include "mlbs/model.hpp"
#include "mlbs/screening.hpp"

namespace mlbs {

struct RewardWeights {
  double w1_final = 4.0;  // N_u weight
  double w2_final = 0.1;  // T_d weight
  double w1_step = 4.0;   // unused-bus penalty
  double w2_step = 0.1;   // deadhead-minute penalty
  double w3_step = 2.0;   // rest-rank reward
  double w4_step = 1.0;   // demand-direction penalty
};

struct StepContext {
  bool selected_used = false;
  int rest_rank = 0;        // p^v, 1-based among used eligible buses
  int used_eligible = 0;    // N_o
  Minute deadhead = 0;      // k^v (0 for v_p selections and online mode)
  bool is_deadhead_selection = false;  // bus came from v_q
  bool used_bus_available = false;     // a used eligible bus existed
  double demand_origin = 0.0;    // U_1: bus's current CP
  double demand_terminal = 0.0;  // U_2: terminal CP of the entry's line
  Mode mode = Mode::Offline;
};

// r_m = -w1 * N_u - w2 * T_d
double final_reward(const ObjectiveReport& report, const RewardWeights& w);

// r_k = (N_o - p_v) / N_o for used selections, 0 for unused.
double rest_rank_reward(bool selected_used, int p_v, int n_o);

// U_c = n_s^c / (n_o^c + 1)
double demand_degree(int n_s_c, int n_o_c);

// r_b = -w1 * r_n - w2 * k^v + w3 * r_k - w4 * r_u
double step_reward(const StepContext& ctx, const RewardWeights& w);

}  // namespace mlbs
