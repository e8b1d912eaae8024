#include "dop/solver.hpp"

#include <algorithm>
#include <cmath>

#include "dop/kernels.hpp"
#include "dop/rng.hpp"

namespace dop {

void SolverConfig::validate(int n) const {
  if (tau <= 0.0) throw std::invalid_argument("SolverConfig: tau must be > 0");
  if (alpha <= 0.0) throw std::invalid_argument("SolverConfig: alpha must be > 0");
  if (max_iters < 0) throw std::invalid_argument("SolverConfig: negative max_iters");
  if (r_prime < 0 || r_prime > n)
    throw std::invalid_argument("SolverConfig: r_prime must be in [0, n]");
  if (const auto* tg = std::get_if<TheoryGamma>(&init); tg && tg->gamma <= 0.0)
    throw std::invalid_argument("SolverConfig: gamma must be > 0");
  if (const auto* gs = std::get_if<GaussianStd>(&init); gs && gs->sigma <= 0.0)
    throw std::invalid_argument("SolverConfig: sigma must be > 0");
}

SymMatrix FactorState::X() const {
  SymMatrix x(n());
  Vec buf(static_cast<size_t>(n()) * n());
  self_outer(U, buf);
  for (int i = 0; i < n(); ++i)
    for (int j = i; j < n(); ++j) x.set(i, j, buf[static_cast<size_t>(i) * n() + j]);
  return x;
}

Vec FactorState::s() const {
  Vec out(g.size());
  for (size_t i = 0; i < g.size(); ++i) out[i] = g[i] * g[i] - h[i] * h[i];
  return out;
}

double FactorState::max_abs() const {
  double v = U.max_abs();
  for (double x : g) v = std::max(v, std::abs(x));
  for (double x : h) v = std::max(v, std::abs(x));
  return v;
}

FactorState init_state(int n, int m, const SolverConfig& cfg) {
  cfg.validate(n);
  const int rp = cfg.r_prime == 0 ? n : cfg.r_prime;
  FactorState st;
  st.U = Matrix(n, rp);
  st.g.assign(m, 0.0);
  st.h.assign(m, 0.0);
  st.xi.assign(m, 0.0);
  if (const auto* tg = std::get_if<TheoryGamma>(&cfg.init)) {
    for (int i = 0; i < std::min(n, rp); ++i) st.U(i, i) = tg->gamma;
    std::fill(st.g.begin(), st.g.end(), tg->gamma);
    std::fill(st.h.begin(), st.h.end(), tg->gamma);
  } else {
    const auto& gs = std::get<GaussianStd>(cfg.init);
    Rng rng(gs.seed);
    for (double& v : st.U.flat()) v = gs.sigma * rng.normal();
    for (double& v : st.g) v = gs.sigma * rng.normal();
    st.h = st.g;
  }
  return st;
}

namespace {

Vec residual_into(const FactorState& st, const MeasurementOp& op, const Vec& y,
                  Vec& xbuf) {
  const int n = st.n();
  xbuf.resize(static_cast<size_t>(n) * n);
  self_outer(st.U, xbuf);
  SymMatrix x(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) x.set(i, j, xbuf[static_cast<size_t>(i) * n + j]);
  Vec r = op.apply(x);
  for (size_t i = 0; i < r.size(); ++i) r[i] += st.g[i] * st.g[i] - st.h[i] * st.h[i] - y[i];
  return r;
}

/// In-place update given the residual at the current state.
void apply_step(FactorState& st, const MeasurementOp& op, const Vec& r, double tau,
                double alpha) {
  const int n = st.n();
  if (op.kind() == MeasurementOp::Kind::DiagonalFamily) {
    // A*(r) is diagonal: row scaling of U avoids the full gemm.
    Vec d(n, 0.0);
    for (int i = 0; i < op.m(); ++i)
      for (int j = 0; j < n; ++j) d[j] += r[i] * op.diagonals()[i][j];
    for (int i = 0; i < n; ++i) {
      const double c = tau * d[i];
      for (int j = 0; j < st.r_prime(); ++j) st.U(i, j) -= c * st.U(i, j);
    }
  } else {
    SymMatrix ar = op.adjoint(r);
    Matrix delta = gemm(ar.dense(), st.U);
    for (size_t i = 0; i < st.U.flat().size(); ++i)
      st.U.flat()[i] -= tau * delta.flat()[i];
  }
  const double at = alpha * tau;
  for (size_t i = 0; i < st.g.size(); ++i) {
    st.g[i] -= at * r[i] * st.g[i];
    st.h[i] += at * r[i] * st.h[i];
    st.xi[i] -= tau * r[i];
  }
  ++st.k;
}

void check_finite(const FactorState& st, double cap) {
  const double v = st.max_abs();
  if (!std::isfinite(v) || v > cap) throw DivergenceError(st.k, v);
}

}  // namespace

Vec residual(const FactorState& st, const MeasurementOp& op, const Vec& y) {
  if (static_cast<int>(y.size()) != op.m() || st.m() != op.m() || st.n() != op.n())
    throw std::invalid_argument("residual: dimension mismatch");
  Vec xbuf;
  return residual_into(st, op, y, xbuf);
}

double loss(const FactorState& st, const MeasurementOp& op, const Vec& y) {
  const Vec r = residual(st, op, y);
  return 0.25 * dot(r, r);
}

void gd_step(FactorState& st, const MeasurementOp& op, const Vec& y, double tau,
             double alpha) {
  if (tau <= 0.0 || alpha <= 0.0)
    throw std::invalid_argument("gd_step: tau and alpha must be > 0");
  const Vec r = residual(st, op, y);
  apply_step(st, op, r, tau, alpha);
  check_finite(st, 1e12);
}

RecoveryResult solve(const MeasurementOp& op, const Vec& y, const SolverConfig& cfg,
                     bool record_snapshots) {
  cfg.validate(op.n());
  FactorState st = init_state(op.n(), op.m(), cfg);

  const double ynorm = norm2(y);
  const double tol = cfg.stop_tol_rel * std::max(ynorm, 1e-300);
  const long stride =
      cfg.snapshot_stride > 0 ? cfg.snapshot_stride : std::max<long>(1, cfg.max_iters / 200);

  RecoveryResult res;
  Vec xbuf;
  try {
    while (true) {
      const Vec r = residual_into(st, op, y, xbuf);
      const double rnorm = norm2(r);
      if (st.k % stride == 0 || rnorm <= tol || st.k >= cfg.max_iters) {
        res.loss_history.emplace_back(st.k, 0.25 * rnorm * rnorm);
        if (record_snapshots) res.snapshots.push_back({st.k, st.U, st.g, st.h, st.xi});
      }
      if (rnorm <= tol) {
        res.converged = true;
        break;
      }
      if (st.k >= cfg.max_iters) break;
      apply_step(st, op, r, cfg.tau, cfg.alpha);
      check_finite(st, cfg.overflow_cap);
    }
  } catch (const DivergenceError&) {
    // Partial history stays useful to the caller; re-throw after filling in
    // what we have.
    res.X_hat = st.X();
    res.s_hat = st.s();
    res.xi_inf = st.xi;
    res.iters_run = st.k;
    throw;
  }

  res.X_hat = st.X();
  res.s_hat = st.s();
  res.xi_inf = st.xi;
  res.iters_run = st.k;
  double ghmax = 0.0;
  for (size_t i = 0; i < st.g.size(); ++i)
    ghmax = std::max(ghmax, std::abs(st.g[i] * st.h[i]));
  res.gh_product_maxabs = ghmax;
  return res;
}

Vec dual_certificate(const Vec& xi_inf, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("dual_certificate: gamma must lie in (0, 1)");
  const double scale = 1.0 / std::log(1.0 / gamma);
  Vec nu(xi_inf.size());
  for (size_t i = 0; i < nu.size(); ++i) nu[i] = scale * xi_inf[i];
  return nu;
}

TheoremReport verify_theorem1(const RecoveryResult& res, const MeasurementOp& op,
                              const Vec& y, double alpha, double gamma, double tol) {
  const Vec nu = dual_certificate(res.xi_inf, gamma);
  TheoremReport rep{};

  Vec ax = op.apply(res.X_hat);
  for (size_t i = 0; i < ax.size(); ++i) ax[i] += res.s_hat[i] - y[i];
  rep.feasibility = norm2(ax);

  const SymMatrix anu = op.adjoint(nu);
  rep.eig_excess = max_eigenvalue(anu) - 1.0;

  // (I - A*(nu)) X
  Matrix prod = gemm(anu.dense(), res.X_hat.dense());
  double num = 0.0;
  for (int i = 0; i < op.n(); ++i)
    for (int j = 0; j < op.n(); ++j) {
      const double d = res.X_hat(i, j) - prod(i, j);
      num += d * d;
    }
  const double xnorm = res.X_hat.frobenius_norm();
  rep.range_residual = xnorm > 0.0 ? std::sqrt(num) / xnorm : 0.0;

  double sign_res = 0.0;
  for (size_t i = 0; i < res.s_hat.size(); ++i) {
    const double an = alpha * nu[i];
    if (std::abs(res.s_hat[i]) > tol) {
      const double sgn = res.s_hat[i] > 0.0 ? 1.0 : -1.0;
      sign_res = std::max(sign_res, std::abs(an - sgn));
    } else {
      sign_res = std::max(sign_res, std::abs(an) - 1.0);
    }
  }
  rep.sign_residual = sign_res;

  rep.gh_rel = res.gh_product_maxabs / (gamma * gamma);
  return rep;
}

double check_flow_closed_form(const std::vector<Snapshot>& snapshots,
                              const MeasurementOp& op, double gamma, double alpha) {
  const int n = op.n();
  double worst = 0.0;
  Vec xbuf(static_cast<size_t>(n) * n);
  for (const auto& snap : snapshots) {
    const SymMatrix e = sym_exp(op.adjoint(snap.xi));
    // X_pred = gamma^2 E^2 since X_0 = gamma^2 I
    Matrix e2 = gemm(e.dense(), e.dense());
    self_outer(snap.U, xbuf);
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < xbuf.size(); ++i) {
      const double p = gamma * gamma * e2.flat()[i];
      const double d = xbuf[i] - p;
      num += d * d;
      den += p * p;
    }
    worst = std::max(worst, std::sqrt(num) / std::max(std::sqrt(den), 1e-300));

    double gnum = 0.0, gden = 0.0, hnum = 0.0, hden = 0.0;
    for (size_t i = 0; i < snap.g.size(); ++i) {
      const double gp = gamma * std::exp(alpha * snap.xi[i]);
      const double hp = gamma * std::exp(-alpha * snap.xi[i]);
      gnum += (snap.g[i] - gp) * (snap.g[i] - gp);
      gden += gp * gp;
      hnum += (snap.h[i] - hp) * (snap.h[i] - hp);
      hden += hp * hp;
    }
    worst = std::max(worst, std::sqrt(gnum / gden));
    worst = std::max(worst, std::sqrt(hnum / hden));
  }
  return worst;
}

}  // namespace dop
