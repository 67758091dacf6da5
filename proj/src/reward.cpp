#include "mlbs/reward.hpp"

namespace mlbs {

double final_reward(const ObjectiveReport& report, const RewardWeights& w) {
  return -w.w1_final * report.n_used - w.w2_final * static_cast<double>(report.deadhead_total);
}

double rest_rank_reward(bool selected_used, int p_v, int n_o) {
  if (!selected_used) return 0.0;
  if (n_o <= 0) {
    throw std::logic_error("rest_rank_reward: used selection with no used eligible buses");
  }
  if (p_v < 1 || p_v > n_o) {
    throw std::logic_error("rest_rank_reward: rank " + std::to_string(p_v) +
                           " outside [1, " + std::to_string(n_o) + "]");
  }
  return static_cast<double>(n_o - p_v) / static_cast<double>(n_o);
}

double demand_degree(int n_s_c, int n_o_c) {
  return static_cast<double>(n_s_c) / static_cast<double>(n_o_c + 1);
}

double step_reward(const StepContext& ctx, const RewardWeights& w) {
  const double r_n = (!ctx.selected_used && ctx.used_bus_available) ? 1.0 : 0.0;
  const double r_k = rest_rank_reward(ctx.selected_used, ctx.rest_rank, ctx.used_eligible);
  double k_v = static_cast<double>(ctx.deadhead);
  double r_u = (ctx.is_deadhead_selection && ctx.demand_origin > ctx.demand_terminal)
                   ? 1.0
                   : 0.0;
  if (ctx.mode == Mode::Online) {
    k_v = 0.0;
    r_u = 0.0;
  }
  return -w.w1_step * r_n - w.w2_step * k_v + w.w3_step * r_k - w.w4_step * r_u;
}

}  // namespace mlbs
