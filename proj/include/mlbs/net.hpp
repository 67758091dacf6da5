#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "mlbs/screening.hpp"

namespace mlbs {

// Shared trunk (input -> 128 relu -> 64 linear -> 32 relu) with a linear
// actor head (one score per action slot) and a linear critic head.
class PolicyValueNet {
 public:
  PolicyValueNet() = default;
  PolicyValueNet(int input_dim, int n_actions, std::uint64_t seed);

  struct Forward {
    std::vector<double> z1, a1;  // 128
    std::vector<double> z2;      // 64, linear activation
    std::vector<double> z3, a3;  // 32
    std::vector<double> logits;  // n_actions
    double value = 0.0;
  };

  Forward forward(const std::vector<double>& x) const;
  double value(const std::vector<double>& x) const;

  // Softmax restricted to valid slots; invalid slots get exactly 0.
  static std::vector<double> masked_softmax(const std::vector<double>& logits,
                                            const std::vector<std::uint8_t>& mask);

  struct Grads {
    std::vector<double> w1, b1, w2, b2, w3, b3, wa, ba, wc;
    double bc = 0.0;
    void zero();
    void scale(double s);
  };
  Grads make_grads() const;

  // Accumulates one sample's gradients given upstream dL/dlogits and dL/dvalue.
  void backward(const std::vector<double>& x, const Forward& f,
                const std::vector<double>& dlogits, double dvalue,
                Grads* grads) const;

  int input_dim() const { return input_dim_; }
  int n_actions() const { return n_actions_; }

  // (pointer, length) view over every parameter tensor, fixed order.
  std::vector<std::pair<double*, std::size_t>> param_views();
  std::vector<std::pair<const double*, std::size_t>> param_views() const;
  std::vector<std::pair<const double*, std::size_t>> grad_views(const Grads&) const;
  std::size_t param_count() const;
  bool all_finite() const;

  bool operator==(const PolicyValueNet&) const = default;

  // Exposed for serialization.
  std::vector<double> w1, b1, w2, b2, w3, b3, wa, ba, wc;
  double bc = 0.0;

 private:
  int input_dim_ = 0;
  int n_actions_ = 0;

 public:
  static constexpr int kH1 = 128;
  static constexpr int kH2 = 64;
  static constexpr int kH3 = 32;
};

struct AdamState {
  std::vector<std::vector<double>> m, v;
  long step = 0;
};

AdamState make_adam_state(const PolicyValueNet& net);

// One Adam step over every parameter tensor; beta1 0.9, beta2 0.999.
void adam_update(PolicyValueNet& net, const PolicyValueNet::Grads& grads,
                 AdamState& state, double lr, double eps);

}  // namespace mlbs
