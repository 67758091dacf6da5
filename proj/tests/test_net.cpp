#include <cmath>
#include <random>

#include "doctest.h"
#include "mlbs/net.hpp"

using namespace mlbs;

namespace {

std::vector<double> randvec(std::size_t n, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> d(-scale, scale);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

}  // namespace

TEST_CASE("masked_softmax") {
  SUBCASE("single valid slot takes all mass") {
    const auto p = PolicyValueNet::masked_softmax({5.0, -3.0, 0.2}, {0, 1, 0});
    CHECK(p[0] == 0.0);
    CHECK(p[1] == doctest::Approx(1.0));
    CHECK(p[2] == 0.0);
  }
  SUBCASE("uniform logits over valid slots") {
    const auto p = PolicyValueNet::masked_softmax({0, 0, 0, 0, 9}, {1, 1, 1, 1, 0});
    for (int i = 0; i < 4; ++i) CHECK(p[i] == doctest::Approx(0.25));
    CHECK(p[4] == 0.0);
  }
  SUBCASE("sums to one on random inputs; masked slots exactly zero") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 100; ++trial) {
      const auto logits = randvec(8, rng, 30.0);
      std::vector<std::uint8_t> mask(8, 0);
      std::uniform_int_distribution<int> coin(0, 1);
      bool any = false;
      for (auto& m : mask) { m = static_cast<std::uint8_t>(coin(rng)); any |= m; }
      if (!any) mask[0] = 1;
      const auto p = PolicyValueNet::masked_softmax(logits, mask);
      double sum = 0.0;
      for (std::size_t i = 0; i < 8; ++i) {
        if (!mask[i]) CHECK(p[i] == 0.0);
        sum += p[i];
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
  SUBCASE("all-masked input is a caller bug") {
    CHECK_THROWS(PolicyValueNet::masked_softmax({1.0, 2.0}, {0, 0}));
  }
}

TEST_CASE("zero-weight network outputs zero value") {
  PolicyValueNet net(10, 4, 0);
  for (auto [ptr, len] : net.param_views()) {
    for (std::size_t i = 0; i < len; ++i) ptr[i] = 0.0;
  }
  std::mt19937_64 rng(1);
  const auto x = randvec(10, rng);
  CHECK(net.value(x) == doctest::Approx(0.0));
  const auto f = net.forward(x);
  for (double l : f.logits) CHECK(l == doctest::Approx(0.0));
}

TEST_CASE("initialization is seeded and finite") {
  PolicyValueNet a(12, 5, 7), b(12, 5, 7), c(12, 5, 8);
  CHECK(a == b);
  CHECK(a != c);
  CHECK(a.all_finite());
  // Uniform bound sqrt(1/fan_in) on the first layer.
  const double bound = std::sqrt(1.0 / 12.0) + 1e-12;
  for (double w : a.w1) CHECK(std::abs(w) <= bound);
  for (double bias : a.b1) CHECK(bias == 0.0);
}

TEST_CASE("forward is deterministic") {
  PolicyValueNet net(9, 3, 21);
  std::mt19937_64 rng(2);
  const auto x = randvec(9, rng);
  const auto f1 = net.forward(x);
  const auto f2 = net.forward(x);
  CHECK(f1.logits == f2.logits);
  CHECK(f1.value == f2.value);
}

TEST_CASE("backward matches central finite differences") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 3; ++trial) {
    PolicyValueNet net(7, 4, 100 + trial);
    const auto x = randvec(7, rng);
    const auto dlogits = randvec(4, rng);
    const double dvalue = randvec(1, rng)[0];

    // Scalar loss L(theta) = dlogits . logits + dvalue * value.
    const auto loss = [&](const PolicyValueNet& n) {
      const auto f = n.forward(x);
      double L = dvalue * f.value;
      for (std::size_t i = 0; i < 4; ++i) L += dlogits[i] * f.logits[i];
      return L;
    };

    auto grads = net.make_grads();
    grads.zero();
    const auto f = net.forward(x);
    net.backward(x, f, dlogits, dvalue, &grads);

    const auto views = net.param_views();
    const auto gviews = net.grad_views(grads);
    REQUIRE(views.size() == gviews.size());
    std::uniform_int_distribution<std::size_t> pick_tensor(0, views.size() - 1);
    int checked = 0;
    while (checked < 60) {
      const std::size_t ti = pick_tensor(rng);
      auto [ptr, len] = views[ti];
      const std::size_t pi =
          std::uniform_int_distribution<std::size_t>(0, len - 1)(rng);
      const double h = 1e-4;
      const double orig = ptr[pi];
      ptr[pi] = orig + h;
      const double up = loss(net);
      ptr[pi] = orig - h;
      const double down = loss(net);
      ptr[pi] = orig;
      const double fd = (up - down) / (2 * h);
      const double analytic = gviews[ti].first[pi];
      const double denom = std::max({std::abs(fd), std::abs(analytic), 1e-6});
      CHECK(std::abs(fd - analytic) / denom <= 1e-4);
      ++checked;
    }
  }
}

TEST_CASE("adam with zero gradients leaves parameters untouched") {
  PolicyValueNet net(6, 3, 9);
  const PolicyValueNet before = net;
  AdamState adam = make_adam_state(net);
  auto grads = net.make_grads();
  grads.zero();
  adam_update(net, grads, adam, 1e-3, 1e-5);
  CHECK(net == before);
}
