#include "mlbs/net.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "mlbs/kernels.hpp"

namespace mlbs {

namespace {

void init_layer(std::vector<double>& w, std::vector<double>& b, int rows,
                int cols, std::mt19937_64& rng) {
  const double bound = std::sqrt(1.0 / cols);
  std::uniform_real_distribution<double> dist(-bound, bound);
  w.resize(static_cast<std::size_t>(rows) * cols);
  for (double& x : w) x = dist(rng);
  b.assign(static_cast<std::size_t>(rows), 0.0);
}

}  // namespace

PolicyValueNet::PolicyValueNet(int input_dim, int n_actions, std::uint64_t seed)
    : input_dim_(input_dim), n_actions_(n_actions) {
  if (input_dim < 1 || n_actions < 1) {
    throw std::invalid_argument("net: dimensions must be positive");
  }
  std::mt19937_64 rng(seed);
  init_layer(w1, b1, kH1, input_dim, rng);
  init_layer(w2, b2, kH2, kH1, rng);
  init_layer(w3, b3, kH3, kH2, rng);
  init_layer(wa, ba, n_actions, kH3, rng);
  const double bound = std::sqrt(1.0 / kH3);
  std::uniform_real_distribution<double> dist(-bound, bound);
  wc.resize(kH3);
  for (double& x : wc) x = dist(rng);
  bc = 0.0;
}

PolicyValueNet::Forward PolicyValueNet::forward(const std::vector<double>& x) const {
  if (static_cast<int>(x.size()) != input_dim_) {
    throw std::invalid_argument("net: state dimension " + std::to_string(x.size()) +
                                " does not match input " + std::to_string(input_dim_));
  }
  const auto& ops = kernels::active();
  Forward f;
  f.z1.resize(kH1);
  ops.gemv(w1.data(), x.data(), b1.data(), f.z1.data(), kH1, x.size());
  f.a1.resize(kH1);
  ops.relu(f.z1.data(), f.a1.data(), kH1);
  f.z2.resize(kH2);
  ops.gemv(w2.data(), f.a1.data(), b2.data(), f.z2.data(), kH2, kH1);
  f.z3.resize(kH3);
  ops.gemv(w3.data(), f.z2.data(), b3.data(), f.z3.data(), kH3, kH2);
  f.a3.resize(kH3);
  ops.relu(f.z3.data(), f.a3.data(), kH3);
  f.logits.resize(n_actions_);
  ops.gemv(wa.data(), f.a3.data(), ba.data(), f.logits.data(), n_actions_, kH3);
  f.value = ops.dot(wc.data(), f.a3.data(), kH3) + bc;
  return f;
}

double PolicyValueNet::value(const std::vector<double>& x) const {
  return forward(x).value;
}

std::vector<double> PolicyValueNet::masked_softmax(
    const std::vector<double>& logits, const std::vector<std::uint8_t>& mask) {
  if (logits.size() != mask.size()) {
    throw std::invalid_argument("masked_softmax: logits/mask size mismatch");
  }
  double max_logit = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (mask[i]) max_logit = std::max(max_logit, logits[i]);
  }
  if (!std::isfinite(max_logit)) {
    throw std::logic_error("masked_softmax: no valid action slot");
  }
  std::vector<double> probs(logits.size(), 0.0);
  double z = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (mask[i]) {
      probs[i] = std::exp(logits[i] - max_logit);
      z += probs[i];
    }
  }
  for (double& p : probs) p /= z;
  return probs;
}

void PolicyValueNet::Grads::zero() {
  for (auto* v : {&w1, &b1, &w2, &b2, &w3, &b3, &wa, &ba, &wc}) {
    std::fill(v->begin(), v->end(), 0.0);
  }
  bc = 0.0;
}

void PolicyValueNet::Grads::scale(double s) {
  for (auto* v : {&w1, &b1, &w2, &b2, &w3, &b3, &wa, &ba, &wc}) {
    for (double& x : *v) x *= s;
  }
  bc *= s;
}

PolicyValueNet::Grads PolicyValueNet::make_grads() const {
  Grads g;
  g.w1.assign(w1.size(), 0.0);
  g.b1.assign(b1.size(), 0.0);
  g.w2.assign(w2.size(), 0.0);
  g.b2.assign(b2.size(), 0.0);
  g.w3.assign(w3.size(), 0.0);
  g.b3.assign(b3.size(), 0.0);
  g.wa.assign(wa.size(), 0.0);
  g.ba.assign(ba.size(), 0.0);
  g.wc.assign(wc.size(), 0.0);
  g.bc = 0.0;
  return g;
}

void PolicyValueNet::backward(const std::vector<double>& x, const Forward& f,
                              const std::vector<double>& dlogits, double dvalue,
                              Grads* grads) const {
  const auto& ops = kernels::active();

  // Heads into the trunk output a3.
  std::vector<double> da3(kH3, 0.0);
  ops.gemv_t(wa.data(), dlogits.data(), da3.data(), n_actions_, kH3);
  ops.axpy(dvalue, wc.data(), da3.data(), kH3);
  ops.ger_acc(grads->wa.data(), dlogits.data(), f.a3.data(), n_actions_, kH3);
  ops.axpy(1.0, dlogits.data(), grads->ba.data(), n_actions_);
  ops.axpy(dvalue, f.a3.data(), grads->wc.data(), kH3);
  grads->bc += dvalue;

  std::vector<double> dz3(kH3);
  ops.relu_backward(f.z3.data(), da3.data(), dz3.data(), kH3);
  ops.ger_acc(grads->w3.data(), dz3.data(), f.z2.data(), kH3, kH2);
  ops.axpy(1.0, dz3.data(), grads->b3.data(), kH3);

  std::vector<double> dz2(kH2);  // layer 2 is linear
  ops.gemv_t(w3.data(), dz3.data(), dz2.data(), kH3, kH2);
  ops.ger_acc(grads->w2.data(), dz2.data(), f.a1.data(), kH2, kH1);
  ops.axpy(1.0, dz2.data(), grads->b2.data(), kH2);

  std::vector<double> da1(kH1);
  ops.gemv_t(w2.data(), dz2.data(), da1.data(), kH2, kH1);
  std::vector<double> dz1(kH1);
  ops.relu_backward(f.z1.data(), da1.data(), dz1.data(), kH1);
  ops.ger_acc(grads->w1.data(), dz1.data(), x.data(), kH1, x.size());
  ops.axpy(1.0, dz1.data(), grads->b1.data(), kH1);
}

std::vector<std::pair<double*, std::size_t>> PolicyValueNet::param_views() {
  return {{w1.data(), w1.size()}, {b1.data(), b1.size()},
          {w2.data(), w2.size()}, {b2.data(), b2.size()},
          {w3.data(), w3.size()}, {b3.data(), b3.size()},
          {wa.data(), wa.size()}, {ba.data(), ba.size()},
          {wc.data(), wc.size()}, {&bc, 1}};
}

std::vector<std::pair<const double*, std::size_t>> PolicyValueNet::param_views() const {
  return {{w1.data(), w1.size()}, {b1.data(), b1.size()},
          {w2.data(), w2.size()}, {b2.data(), b2.size()},
          {w3.data(), w3.size()}, {b3.data(), b3.size()},
          {wa.data(), wa.size()}, {ba.data(), ba.size()},
          {wc.data(), wc.size()}, {&bc, 1}};
}

std::vector<std::pair<const double*, std::size_t>> PolicyValueNet::grad_views(
    const Grads& g) const {
  return {{g.w1.data(), g.w1.size()}, {g.b1.data(), g.b1.size()},
          {g.w2.data(), g.w2.size()}, {g.b2.data(), g.b2.size()},
          {g.w3.data(), g.w3.size()}, {g.b3.data(), g.b3.size()},
          {g.wa.data(), g.wa.size()}, {g.ba.data(), g.ba.size()},
          {g.wc.data(), g.wc.size()}, {&g.bc, 1}};
}

std::size_t PolicyValueNet::param_count() const {
  std::size_t n = 0;
  for (const auto& [p, len] : param_views()) n += len;
  return n;
}

bool PolicyValueNet::all_finite() const {
  for (const auto& [p, len] : param_views()) {
    for (std::size_t i = 0; i < len; ++i) {
      if (!std::isfinite(p[i])) return false;
    }
  }
  return true;
}

AdamState make_adam_state(const PolicyValueNet& net) {
  AdamState s;
  for (const auto& [p, len] : net.param_views()) {
    s.m.emplace_back(len, 0.0);
    s.v.emplace_back(len, 0.0);
  }
  return s;
}

void adam_update(PolicyValueNet& net, const PolicyValueNet::Grads& grads,
                 AdamState& state, double lr, double eps) {
  const auto& ops = kernels::active();
  ++state.step;
  const double bc1 = 1.0 - std::pow(0.9, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(0.999, static_cast<double>(state.step));
  auto params = net.param_views();
  auto gviews = net.grad_views(grads);
  for (std::size_t t = 0; t < params.size(); ++t) {
    ops.adam_step(params[t].first, state.m[t].data(), state.v[t].data(),
                  gviews[t].first, params[t].second, lr, 0.9, 0.999, eps, bc1, bc2);
  }
}

}  // namespace mlbs
