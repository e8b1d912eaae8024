#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "dop/rng.hpp"
#include "dop/solver.hpp"

using namespace dop;

namespace {

Vec make_y(const MeasurementOp& op, const SymMatrix& x, const Vec& s) {
  Vec y = op.apply(x);
  for (size_t i = 0; i < y.size(); ++i) y[i] += s[i];
  return y;
}

}  // namespace

TEST_CASE("two hand-rolled scalar steps") {
  // n = 1, identity op: A(X) = x, one measurement. gamma = 0.1, alpha = 2,
  // tau = 0.01, y = 1. Recurrences computed with plain doubles below are the
  // oracle; gd_step must match to near machine precision.
  const MeasurementOp op = MeasurementOp::identity(1);
  const double gamma = 0.1, alpha = 2.0, tau = 0.01, y0 = 1.0;

  SolverConfig cfg;
  cfg.alpha = alpha;
  cfg.tau = tau;
  cfg.init = TheoryGamma{gamma};
  FactorState st = init_state(1, 1, cfg);

  double u = gamma, g = gamma, h = gamma, xi = 0.0;
  for (int k = 0; k < 2; ++k) {
    const double r = u * u + g * g - h * h - y0;
    u -= tau * r * u;
    g -= alpha * tau * r * g;
    h += alpha * tau * r * h;
    xi -= tau * r;
    gd_step(st, op, {y0}, tau, alpha);
  }
  CHECK(st.U(0, 0) == doctest::Approx(u).epsilon(1e-12));
  CHECK(st.g[0] == doctest::Approx(g).epsilon(1e-12));
  CHECK(st.h[0] == doctest::Approx(h).epsilon(1e-12));
  CHECK(st.xi[0] == doctest::Approx(xi).epsilon(1e-12));
  CHECK(st.k == 2);
}

TEST_CASE("zero residual is a fixed point") {
  const MeasurementOp op = MeasurementOp::identity(2);
  SolverConfig cfg;
  cfg.init = TheoryGamma{0.5};
  FactorState st = init_state(2, 4, cfg);
  const Vec y = make_y(op, st.X(), st.s());  // residual is exactly zero
  const FactorState before = st;
  gd_step(st, op, y, 0.1, 3.0);
  for (size_t i = 0; i < st.U.flat().size(); ++i)
    CHECK(st.U.flat()[i] == before.U.flat()[i]);
  CHECK(st.g == before.g);
  CHECK(st.h == before.h);
  CHECK(st.xi == Vec(4, 0.0));
}

TEST_CASE("loss is a quarter of the squared residual norm") {
  Rng rng(31);
  const MeasurementOp op = MeasurementOp::identity(3);
  SolverConfig cfg;
  cfg.init = GaussianStd{0.3, 5};
  FactorState st = init_state(3, 9, cfg);
  Vec y(9);
  for (double& v : y) v = rng.normal();
  const Vec r = residual(st, op, y);
  double rn2 = 0.0;
  for (double v : r) rn2 += v * v;
  CHECK(loss(st, op, y) == doctest::Approx(0.25 * rn2).epsilon(1e-14));
}

TEST_CASE("gd_step implements the gradient of the loss") {
  // finite-difference check of d loss / d(U, g, h) against the step taken
  Rng rng(32);
  const int n = 3, m = 9;
  const MeasurementOp op = MeasurementOp::identity(n);
  SolverConfig cfg;
  cfg.init = GaussianStd{0.5, 7};
  cfg.alpha = 2.5;
  Vec y(m);
  for (double& v : y) v = rng.normal();

  const double tau = 1.0;  // step equals the raw (scaled) gradient
  const double eps = 1e-6;

  FactorState base = init_state(n, m, cfg);
  FactorState stepped = base;
  gd_step(stepped, op, y, tau, cfg.alpha);

  auto fd = [&](auto&& mutate) {
    FactorState plus = base, minus = base;
    mutate(plus, eps);
    mutate(minus, -eps);
    return (loss(plus, op, y) - loss(minus, op, y)) / (2.0 * eps);
  };

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < base.r_prime(); ++j) {
      const double grad = fd([&](FactorState& s, double d) { s.U(i, j) += d; });
      const double step = base.U(i, j) - stepped.U(i, j);
      CHECK(step == doctest::Approx(tau * grad).epsilon(1e-5));
    }
  for (int i = 0; i < m; ++i) {
    const double gg = fd([&](FactorState& s, double d) { s.g[i] += d; });
    CHECK(base.g[i] - stepped.g[i] == doctest::Approx(cfg.alpha * tau * gg).epsilon(1e-5));
    const double gh = fd([&](FactorState& s, double d) { s.h[i] += d; });
    CHECK(base.h[i] - stepped.h[i] == doctest::Approx(cfg.alpha * tau * gh).epsilon(1e-5));
  }
}

TEST_CASE("gaussian initialization is deterministic and respects sigma") {
  SolverConfig cfg;
  cfg.init = GaussianStd{0.2, 42};
  const FactorState a = init_state(8, 64, cfg);
  const FactorState b = init_state(8, 64, cfg);
  for (size_t i = 0; i < a.U.flat().size(); ++i) CHECK(a.U.flat()[i] == b.U.flat()[i]);
  CHECK(a.g == b.g);
  CHECK(a.h == a.g);  // h starts as a copy of g

  double ss = 0.0;
  for (double v : a.U.flat()) ss += v * v;
  const double sample_std = std::sqrt(ss / static_cast<double>(a.U.flat().size()));
  CHECK(sample_std == doctest::Approx(0.2).epsilon(0.15));

  cfg.init = GaussianStd{0.2, 43};
  const FactorState c = init_state(8, 64, cfg);
  CHECK(c.U(0, 0) != a.U(0, 0));
}

TEST_CASE("theory initialization") {
  SolverConfig cfg;
  cfg.r_prime = 2;
  cfg.init = TheoryGamma{0.05};
  const FactorState st = init_state(4, 6, cfg);
  CHECK(st.U.rows() == 4);
  CHECK(st.U.cols() == 2);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 2; ++j)
      CHECK(st.U(i, j) == (i == j ? 0.05 : 0.0));
  CHECK(st.g == Vec(6, 0.05));
  CHECK(st.h == Vec(6, 0.05));
}

TEST_CASE("g.h products stay near gamma^2, tighter for smaller tau") {
  const int n = 4;
  const MeasurementOp op = MeasurementOp::identity(n);
  Rng rng(33);
  SymMatrix x(n);
  Matrix u(n, 2);
  for (double& v : u.flat()) v = rng.normal();
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double v = 0.0;
      for (int k = 0; k < 2; ++k) v += u(i, k) * u(j, k);
      x.set(i, j, v);
    }
  Vec s(n * n, 0.0);
  s[1] = 2.0;
  s[n] = 2.0;
  const Vec y = make_y(op, x, s);

  auto drift = [&](double tau) {
    SolverConfig cfg;
    cfg.alpha = 1.0;
    cfg.tau = tau;
    cfg.max_iters = static_cast<long>(0.4 / tau);
    cfg.init = TheoryGamma{1e-2};
    const RecoveryResult res = solve(op, y, cfg);
    return std::abs(res.gh_product_maxabs - 1e-4) / 1e-4;
  };

  const double d1 = drift(1e-3);
  const double d2 = drift(1e-4);
  CHECK(d1 < 0.5);
  CHECK(d2 < 0.1);
  CHECK(d2 < d1);
}

TEST_CASE("loss history is monotone for small steps") {
  Rng rng(34);
  const int n = 5;
  const MeasurementOp op = MeasurementOp::identity(n);
  Vec y(n * n);
  for (double& v : y) v = rng.normal();
  SolverConfig cfg;
  cfg.alpha = 2.0;
  cfg.tau = 1e-3;
  cfg.max_iters = 2000;
  cfg.snapshot_stride = 10;
  cfg.init = GaussianStd{1e-2, 3};
  const RecoveryResult res = solve(op, y, cfg);
  for (size_t i = 1; i < res.loss_history.size(); ++i)
    CHECK(res.loss_history[i].second <= res.loss_history[i - 1].second + 1e-12);
}

TEST_CASE("divergence raises with iteration info") {
  const MeasurementOp op = MeasurementOp::identity(2);
  SolverConfig cfg;
  cfg.alpha = 1.0;
  cfg.tau = 2.0;  // far above the stable step size
  cfg.max_iters = 5000;
  cfg.init = GaussianStd{1.0, 9};
  const Vec y(4, 5.0);
  CHECK_THROWS_AS((void)solve(op, y, cfg), DivergenceError);
}

TEST_CASE("dual certificate scales xi by 1/log(1/gamma)") {
  const Vec nu = dual_certificate({2.0, -4.0}, 0.1);
  const double c = std::log(10.0);
  CHECK(nu[0] == doctest::Approx(2.0 / c).epsilon(1e-14));
  CHECK(nu[1] == doctest::Approx(-4.0 / c).epsilon(1e-14));
  CHECK_THROWS_AS((void)dual_certificate({1.0}, 1.5), std::invalid_argument);
}

TEST_CASE("config validation") {
  SolverConfig cfg;
  cfg.tau = -1.0;
  CHECK_THROWS_AS(cfg.validate(3), std::invalid_argument);
  cfg = SolverConfig{};
  cfg.r_prime = 5;
  CHECK_THROWS_AS(cfg.validate(3), std::invalid_argument);
  cfg = SolverConfig{};
  cfg.alpha = 0.0;
  CHECK_THROWS_AS(cfg.validate(3), std::invalid_argument);
}
