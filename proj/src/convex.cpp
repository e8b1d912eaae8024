#include "dop/convex.hpp"

#include <algorithm>
#include <cmath>

#include "dop/kernels.hpp"

namespace dop {

double KktResiduals::max_residual() const {
  return std::max({feasibility, range, eig_excess, sign_distance, psd_violation});
}

void ApgConfig::validate() const {
  if (lambda <= 0.0) throw std::invalid_argument("ApgConfig: lambda must be > 0");
  if (!(mu_decay > 0.0 && mu_decay < 1.0))
    throw std::invalid_argument("ApgConfig: mu_decay must lie in (0, 1)");
  if (mu_init != 0.0 && mu_min != 0.0 && !(mu_init > mu_min && mu_min > 0.0))
    throw std::invalid_argument("ApgConfig: need mu_init > mu_min > 0");
  if (max_outer < 1 || max_inner < 1)
    throw std::invalid_argument("ApgConfig: iteration budgets must be >= 1");
}

namespace {

double lipschitz_estimate(const MeasurementOp& op) {
  if (op.kind() == MeasurementOp::Kind::Identity) return 2.0;
  // 20 power iterations on v -> A(A*(v)) + v
  Vec v(op.m(), 1.0 / std::sqrt(static_cast<double>(op.m())));
  double lam = 1.0;
  for (int it = 0; it < 20; ++it) {
    Vec w = op.apply(op.adjoint(v));
    for (size_t i = 0; i < w.size(); ++i) w[i] += v[i];
    lam = norm2(w);
    if (lam == 0.0) return 1.0;
    for (size_t i = 0; i < w.size(); ++i) w[i] /= lam;
    v = std::move(w);
  }
  return 1.01 * lam;
}

double nuclear_norm_psd(const SymMatrix& x) {
  // Iterates stay in the PSD cone (they come out of the prox), so the
  // nuclear norm is the trace.
  return x.trace();
}

double l1_norm(const Vec& v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

double stage_objective(const MeasurementOp& op, const Vec& y, const SymMatrix& x,
                       const Vec& s, double mu, double lambda, Vec& resbuf) {
  resbuf = op.apply(x);
  for (size_t i = 0; i < resbuf.size(); ++i) resbuf[i] += s[i] - y[i];
  return mu * (nuclear_norm_psd(x) + lambda * l1_norm(s)) + 0.5 * dot(resbuf, resbuf);
}

}  // namespace

ConvexSolution apg_solve(const MeasurementOp& op, const Vec& y, const ApgConfig& cfg) {
  cfg.validate();
  if (static_cast<int>(y.size()) != op.m())
    throw std::invalid_argument("apg_solve: dimension mismatch");

  const double ynorm = norm2(y);
  ConvexSolution sol;
  sol.lambda = cfg.lambda;
  sol.X = SymMatrix(op.n());
  sol.s.assign(op.m(), 0.0);
  sol.nu.assign(op.m(), 0.0);

  if (ynorm == 0.0) {
    // Zero data: the origin is optimal and certifies itself.
    sol.kkt = kkt_residuals(sol.X, sol.s, sol.nu, cfg.lambda, op, y);
    sol.converged = true;
    return sol;
  }

  const double mu_init = cfg.mu_init > 0.0 ? cfg.mu_init : 0.25 * ynorm;
  const double mu_min = cfg.mu_min > 0.0 ? cfg.mu_min : 1e-7 * ynorm;
  const double L = lipschitz_estimate(op);
  const double step = 1.0 / L;

  SymMatrix x = sol.X, zx = sol.X, x_prev = sol.X;
  Vec s = sol.s, zs = sol.s, s_prev = sol.s;
  Vec res;

  double mu = mu_init;
  int stage = 0;
  bool budget_hit = false;
  for (; stage < cfg.max_outer; ++stage) {
    double theta = 1.0;
    double f_best = stage_objective(op, y, x, s, mu, cfg.lambda, res);
    zx = x;
    zs = s;
    // The dual estimate divides the final residual by mu_min, which
    // amplifies any leftover primal error; the last stage therefore gets a
    // much tighter tolerance and a bigger budget.
    const bool final_stage = mu <= mu_min;
    const double inner_tol = final_stage ? std::min(cfg.inner_tol, 1e-13) : cfg.inner_tol;
    const int inner_budget = final_stage ? 10 * cfg.max_inner : cfg.max_inner;
    int inner = 0;
    double stage_rel_change = 1.0;
    for (; inner < inner_budget; ++inner) {
      // gradient of the smooth coupling at the momentum point
      res = op.apply(zx);
      for (size_t i = 0; i < res.size(); ++i) res[i] += zs[i] - y[i];
      SymMatrix grad_x = op.adjoint(res);

      SymMatrix vx = zx;
      grad_x *= step;
      vx -= grad_x;
      SymMatrix x_new = psd_nuclear_prox(vx, mu * step);

      Vec vs(zs.size());
      for (size_t i = 0; i < vs.size(); ++i) vs[i] = zs[i] - step * res[i];
      Vec s_new = soft_threshold(vs, cfg.lambda * mu * step);

      const double f_new = stage_objective(op, y, x_new, s_new, mu, cfg.lambda, res);
      if (f_new > f_best) {
        // function-value restart: drop momentum, retry from the best point
        theta = 1.0;
        zx = x;
        zs = s;
        continue;
      }
      f_best = f_new;

      const double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
      const double beta = (theta - 1.0) / theta_next;
      double dx = 0.0, dnorm = 0.0;
      for (int i = 0; i < op.n(); ++i)
        for (int j = 0; j < op.n(); ++j) {
          const double d = x_new(i, j) - x(i, j);
          dx += d * d;
          dnorm += x_new(i, j) * x_new(i, j);
        }
      double ds = 0.0, snorm = 0.0;
      zx = x_new;
      zs = s_new;
      for (size_t i = 0; i < s.size(); ++i) {
        const double d = s_new[i] - s[i];
        ds += d * d;
        snorm += s_new[i] * s_new[i];
        zs[i] += beta * d;
      }
      for (int i = 0; i < op.n(); ++i)
        for (int j = i; j < op.n(); ++j)
          zx.set(i, j, x_new(i, j) + beta * (x_new(i, j) - x(i, j)));

      x = x_new;
      s = std::move(s_new);
      theta = theta_next;
      ++sol.total_inner_iters;

      const double rel_change =
          std::sqrt(dx + ds) / std::max(1.0, std::sqrt(dnorm + snorm));
      stage_rel_change = rel_change;
      if (rel_change < inner_tol) break;
    }
    // the tighter polish tolerance is best-effort; the run converged once
    // the user-level tolerance held on the last stage
    if (final_stage && stage_rel_change >= cfg.inner_tol) budget_hit = true;
    if (mu <= mu_min) break;
    mu = std::max(mu * cfg.mu_decay, mu_min);
  }

  res = op.apply(x);
  for (size_t i = 0; i < res.size(); ++i) res[i] += s[i] - y[i];
  Vec nu(res.size());
  for (size_t i = 0; i < nu.size(); ++i) nu[i] = -res[i] / mu;

  sol.X = std::move(x);
  sol.s = std::move(s);
  sol.nu = std::move(nu);
  sol.outer_stages = stage + 1;
  sol.kkt = kkt_residuals(sol.X, sol.s, sol.nu, cfg.lambda, op, y);
  sol.converged = !budget_hit;
  return sol;
}

KktResiduals kkt_residuals(const SymMatrix& X, const Vec& s, const Vec& nu,
                           double lambda, const MeasurementOp& op, const Vec& y) {
  if (lambda <= 0.0) throw std::invalid_argument("kkt_residuals: lambda must be > 0");
  KktResiduals k{};

  Vec res = op.apply(X);
  for (size_t i = 0; i < res.size(); ++i) res[i] += s[i] - y[i];
  const double ynorm = norm2(y);
  k.feasibility = ynorm > 0.0 ? norm2(res) / ynorm : norm2(res);

  const SymMatrix anu = op.adjoint(nu);
  Matrix prod = gemm(anu.dense(), X.dense());
  double num = 0.0;
  for (int i = 0; i < op.n(); ++i)
    for (int j = 0; j < op.n(); ++j) {
      const double d = X(i, j) - prod(i, j);
      num += d * d;
    }
  k.range = std::sqrt(num) / std::max(1.0, X.frobenius_norm());

  k.eig_excess = std::max(0.0, max_eigenvalue(anu) - 1.0);

  const double zero_band = 1e-8 * norm_inf(s);
  double sd = 0.0;
  for (size_t i = 0; i < s.size(); ++i) {
    const double scaled = nu[i] / lambda;
    if (std::abs(s[i]) > zero_band) {
      const double sgn = s[i] > 0.0 ? 1.0 : -1.0;
      sd = std::max(sd, std::abs(scaled - sgn));
    } else {
      sd = std::max(sd, std::max(0.0, std::abs(scaled) - 1.0));
    }
  }
  k.sign_distance = sd;

  const EigDecomp e = sym_eig(X);
  k.psd_violation = std::max(0.0, -e.eigenvalues.back());
  return k;
}

}  // namespace dop
