#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "mlbs/kernels.hpp"

using namespace mlbs::kernels;

namespace {

std::vector<double> randvec(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

void check_close(const std::vector<double>& a, const std::vector<double>& b) {
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
  }
}

}  // namespace

TEST_CASE("scalar kernels: known values") {
  const auto& ops = scalar_ops();
  const double W[6] = {1, 2, 3, 4, 5, 6};  // 2x3
  const double x[3] = {1, 0, -1};
  const double b[2] = {10, 20};
  double y[2];
  ops.gemv(W, x, b, y, 2, 3);
  CHECK(y[0] == doctest::Approx(10 + 1 - 3));
  CHECK(y[1] == doctest::Approx(20 + 4 - 6));

  const double g[2] = {1, -1};
  double out[3];
  ops.gemv_t(W, g, out, 2, 3);
  CHECK(out[0] == doctest::Approx(1 - 4));
  CHECK(out[1] == doctest::Approx(2 - 5));
  CHECK(out[2] == doctest::Approx(3 - 6));

  CHECK(ops.dot(x, x, 3) == doctest::Approx(2.0));

  double acc[3] = {0, 0, 0};
  ops.axpy(2.0, x, acc, 3);
  CHECK(acc[0] == doctest::Approx(2.0));
  CHECK(acc[2] == doctest::Approx(-2.0));

  const double pre[4] = {-1, 0, 0.5, 3};
  double r[4];
  ops.relu(pre, r, 4);
  CHECK(r[0] == 0.0);
  CHECK(r[1] == 0.0);
  CHECK(r[2] == 0.5);
  CHECK(r[3] == 3.0);
  const double up[4] = {7, 7, 7, 7};
  double dx[4];
  ops.relu_backward(pre, up, dx, 4);
  CHECK(dx[0] == 0.0);
  CHECK(dx[1] == 0.0);  // gradient 0 at exactly 0
  CHECK(dx[2] == 7.0);
  CHECK(dx[3] == 7.0);
}

TEST_CASE("adam_step matches a hand-computed first step") {
  const auto& ops = scalar_ops();
  double p = 1.0, m = 0.0, v = 0.0;
  const double g = 0.5;
  const double lr = 1e-3, b1 = 0.9, b2 = 0.999, eps = 1e-5;
  ops.adam_step(&p, &m, &v, &g, 1, lr, b1, b2, eps, 1 - b1, 1 - b2);
  // m = 0.1*g, v = 0.001*g^2; m_hat = g, v_hat = g^2.
  const double expect = 1.0 - lr * g / (std::sqrt(g * g) + eps);
  CHECK(p == doctest::Approx(expect).epsilon(1e-12));
  CHECK(m == doctest::Approx(0.05));
}

TEST_CASE("avx2 kernels agree with the scalar reference") {
  const auto& s = scalar_ops();
  const auto& a = avx2_ops();
  INFO("active backend: ", active().name, ", avx2 available: ", avx2_available());
  std::mt19937_64 rng(31337);
  // Sizes straddling vector width and remainder handling.
  for (const std::size_t rows : {1u, 3u, 8u, 17u}) {
    for (const std::size_t cols : {1u, 4u, 31u, 128u}) {
      const auto W = randvec(rows * cols, rng);
      const auto x = randvec(cols, rng);
      const auto b = randvec(rows, rng);
      std::vector<double> ys(rows), ya(rows);
      s.gemv(W.data(), x.data(), b.data(), ys.data(), rows, cols);
      a.gemv(W.data(), x.data(), b.data(), ya.data(), rows, cols);
      check_close(ys, ya);

      const auto g = randvec(rows, rng);
      std::vector<double> os(cols), oa(cols);
      s.gemv_t(W.data(), g.data(), os.data(), rows, cols);
      a.gemv_t(W.data(), g.data(), oa.data(), rows, cols);
      check_close(os, oa);

      auto dWs = randvec(rows * cols, rng);
      auto dWa = dWs;
      s.ger_acc(dWs.data(), g.data(), x.data(), rows, cols);
      a.ger_acc(dWa.data(), g.data(), x.data(), rows, cols);
      check_close(dWs, dWa);
    }
  }
  for (const std::size_t n : {1u, 5u, 64u, 111u}) {
    const auto x = randvec(n, rng);
    const auto y = randvec(n, rng);
    CHECK(s.dot(x.data(), y.data(), n) ==
          doctest::Approx(a.dot(x.data(), y.data(), n)).epsilon(1e-12));

    std::vector<double> rs(n), ra(n);
    s.relu(x.data(), rs.data(), n);
    a.relu(x.data(), ra.data(), n);
    check_close(rs, ra);
    s.relu_backward(x.data(), y.data(), rs.data(), n);
    a.relu_backward(x.data(), y.data(), ra.data(), n);
    check_close(rs, ra);

    auto accs = randvec(n, rng);
    auto acca = accs;
    s.axpy(1.7, x.data(), accs.data(), n);
    a.axpy(1.7, x.data(), acca.data(), n);
    check_close(accs, acca);

    auto ps = randvec(n, rng);
    auto pa = ps;
    auto ms = randvec(n, rng);
    auto ma = ms;
    auto vs = x;  // reuse as squared-ish input
    for (auto& e : vs) e = std::abs(e);
    auto va = vs;
    s.adam_step(ps.data(), ms.data(), vs.data(), y.data(), n, 1e-3, 0.9, 0.999,
                1e-5, 0.1, 0.001);
    a.adam_step(pa.data(), ma.data(), va.data(), y.data(), n, 1e-3, 0.9, 0.999,
                1e-5, 0.1, 0.001);
    check_close(ps, pa);
    check_close(ms, ma);
    check_close(vs, va);
  }
}

TEST_CASE("dispatch resolves to a known backend") {
  const std::string name = active().name;
  CHECK((name == "scalar" || name == "avx2"));
  if (avx2_available() && std::getenv("MLBS_KERNELS") == nullptr) {
    CHECK(name == "avx2");
  }
}
