#include "dop/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dop/kernels.hpp"
#include "dop/rng.hpp"

namespace dop {

uint64_t derive_seed(uint64_t base_seed, uint64_t stream) {
  // SplitMix64 over the combined word; one-way and collision-free enough
  // for experiment substreams.
  uint64_t z = base_seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

GroundTruth gen_ground_truth(int n, int r, double p, double outlier_std, uint64_t seed,
                             int m) {
  if (n < 1 || r < 1 || r > n)
    throw std::invalid_argument("gen_ground_truth: need 1 <= r <= n");
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("gen_ground_truth: p outside [0,1]");
  if (outlier_std < 0.0) throw std::invalid_argument("gen_ground_truth: negative std");
  if (m == 0) m = n * n;

  Rng rng(seed);
  Matrix u(n, r);
  for (double& v : u.flat()) v = rng.normal();

  GroundTruth gt;
  gt.X_star = SymMatrix(n);
  {
    Vec buf(static_cast<size_t>(n) * n);
    self_outer(u, buf);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) gt.X_star.set(i, j, buf[static_cast<size_t>(i) * n + j]);
  }

  gt.s_star.assign(m, 0.0);
  const int nnz = static_cast<int>(std::nearbyint(m * p));  // ties to even
  std::vector<int> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < nnz; ++i) {
    const int j = i + static_cast<int>(rng.below(static_cast<uint64_t>(m - i)));
    std::swap(idx[i], idx[j]);
    gt.s_star[idx[i]] = outlier_std * rng.normal();
  }

  gt.r = r;
  gt.p = p;
  gt.outlier_std = outlier_std;
  gt.seed = seed;
  return gt;
}

double relative_error(const SymMatrix& x_hat, const SymMatrix& x_star) {
  if (x_hat.n() != x_star.n())
    throw std::invalid_argument("relative_error: dimension mismatch");
  const double den = x_star.frobenius_norm();
  if (den == 0.0) throw std::invalid_argument("relative_error: zero ground truth");
  double num = 0.0;
  for (size_t i = 0; i < x_hat.flat().size(); ++i) {
    const double d = x_hat.flat()[i] - x_star.flat()[i];
    num += d * d;
  }
  return std::sqrt(num) / den;
}

namespace {

double vec_rel_err(const Vec& est, const Vec& truth) {
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < est.size(); ++i) {
    const double d = est[i] - truth[i];
    num += d * d;
    den += truth[i] * truth[i];
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

struct RunOutcome {
  double err_x = 1.0;
  double err_s = 1.0;
  bool diverged = false;
};

RunOutcome run_dop_identity(int n, const GroundTruth& gt, double alpha, double tau,
                            double init_std, long max_iters, uint64_t init_seed) {
  const MeasurementOp op = MeasurementOp::identity(n);
  Vec y = op.apply(gt.X_star);
  for (size_t i = 0; i < y.size(); ++i) y[i] += gt.s_star[i];

  SolverConfig cfg;
  cfg.alpha = alpha;
  cfg.tau = tau;
  cfg.max_iters = max_iters;
  cfg.init = GaussianStd{init_std, init_seed};

  RunOutcome out;
  try {
    const RecoveryResult res = solve(op, y, cfg);
    out.err_x = relative_error(res.X_hat, gt.X_star);
    out.err_s = vec_rel_err(res.s_hat, gt.s_star);
  } catch (const DivergenceError&) {
    out.diverged = true;  // counted as a total-failure trial
  }
  return out;
}

RunOutcome run_convex_identity(int n, const GroundTruth& gt, const ConvexMethod& method) {
  const MeasurementOp op = MeasurementOp::identity(n);
  Vec y = op.apply(gt.X_star);
  for (size_t i = 0; i < y.size(); ++i) y[i] += gt.s_star[i];

  ApgConfig cfg = method.apg;
  cfg.lambda = method.lambda;

  RunOutcome out;
  try {
    const ConvexSolution sol = apg_solve(op, y, cfg);
    out.err_x = relative_error(sol.X, gt.X_star);
    out.err_s = vec_rel_err(sol.s, gt.s_star);
  } catch (const std::exception&) {
    out.diverged = true;
  }
  return out;
}

}  // namespace

std::vector<AlphaSweepRow> alpha_sweep(const SweepSetup& setup, const Vec& alphas,
                                       const std::vector<uint64_t>& seeds) {
  if (alphas.empty()) throw std::invalid_argument("alpha_sweep: no alphas");
  if (seeds.empty()) throw std::invalid_argument("alpha_sweep: no seeds");

  const int na = static_cast<int>(alphas.size());
  const int ns = static_cast<int>(seeds.size());
  std::vector<RunOutcome> outcomes(static_cast<size_t>(na) * ns);

#pragma omp parallel for collapse(2) schedule(dynamic)
  for (int a = 0; a < na; ++a)
    for (int s = 0; s < ns; ++s) {
      const GroundTruth gt =
          gen_ground_truth(setup.n, setup.r, setup.p, setup.outlier_std, seeds[s]);
      outcomes[static_cast<size_t>(a) * ns + s] =
          run_dop_identity(setup.n, gt, alphas[a], setup.tau, setup.init_std,
                           setup.max_iters, derive_seed(seeds[s], 1));
    }

  std::vector<AlphaSweepRow> rows(na);
  for (int a = 0; a < na; ++a) {
    AlphaSweepRow row{alphas[a], 0.0, 0.0, 0};
    for (int s = 0; s < ns; ++s) {
      const RunOutcome& o = outcomes[static_cast<size_t>(a) * ns + s];
      row.mean_rel_err_X += o.err_x;
      row.mean_rel_err_s += o.err_s;
      if (o.diverged) ++row.diverged;
    }
    row.mean_rel_err_X /= ns;
    row.mean_rel_err_s /= ns;
    rows[a] = row;
  }
  return rows;
}

PhaseGridResult phase_grid(int n, const std::vector<int>& r_values, const Vec& p_values,
                           int trials, const PhaseMethod& method, uint64_t base_seed) {
  if (r_values.empty() || p_values.empty())
    throw std::invalid_argument("phase_grid: empty grid");
  if (trials < 1) throw std::invalid_argument("phase_grid: trials must be >= 1");

  const size_t ncells = r_values.size() * p_values.size();
  std::vector<RunOutcome> outcomes(ncells * trials);

  constexpr uint64_t kTrialStride = 1ULL << 16;

#pragma omp parallel for collapse(2) schedule(dynamic)
  for (long cell = 0; cell < static_cast<long>(ncells); ++cell)
    for (int t = 0; t < trials; ++t) {
      const int r = r_values[cell / p_values.size()];
      const double p = p_values[cell % p_values.size()];
      const uint64_t stream = static_cast<uint64_t>(cell) * kTrialStride + t;
      const uint64_t seed = derive_seed(base_seed, stream);
      const double outlier_std = 10.0;
      const GroundTruth gt = gen_ground_truth(n, r, p, outlier_std, seed);
      RunOutcome o;
      if (const auto* dm = std::get_if<DopMethod>(&method))
        o = run_dop_identity(n, gt, dm->alpha, dm->tau, dm->init_std, dm->max_iters,
                             derive_seed(seed, 1));
      else
        o = run_convex_identity(n, gt, std::get<ConvexMethod>(method));
      outcomes[static_cast<size_t>(cell) * trials + t] = o;
    }

  PhaseGridResult res;
  res.r_values = r_values;
  res.p_values = p_values;
  res.trials = trials;
  res.success_fraction.assign(ncells, 0.0);
  res.mean_rel_err.assign(ncells, 0.0);
  for (size_t cell = 0; cell < ncells; ++cell) {
    int ok = 0;
    double err = 0.0;
    for (int t = 0; t < trials; ++t) {
      const RunOutcome& o = outcomes[cell * trials + t];
      if (!o.diverged && o.err_x < 0.1) ++ok;
      err += o.err_x;
    }
    res.success_fraction[cell] = static_cast<double>(ok) / trials;
    res.mean_rel_err[cell] = err / trials;
  }
  return res;
}

TheoryInstance make_certified_diagonal_instance(int n, int m, double alpha,
                                                uint64_t seed, int max_attempts) {
  if (n < 3 || m < 6) throw std::invalid_argument("certified instance: need n >= 3, m >= 6");
  if (alpha <= 0.0) throw std::invalid_argument("certified instance: alpha must be > 0");

  const double lambda = 1.0 / alpha;
  const int kx = 2;                            // planted rank
  const std::vector<double> signs{1, -1, 1};   // planted outlier signs
  const int ks = static_cast<int>(signs.size());
  // At finite gamma the zero entries of the limit decay like
  // gamma^(2(1 - q)) with q the relative dual magnitude, so q must stay
  // well below 1 for them to read as zero at desk-scale gamma. q <= 0.5
  // keeps them at or below gamma.
  const double margin = 0.5;

  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    Rng rng(derive_seed(seed, static_cast<uint64_t>(attempt)));
    std::vector<Vec> diags(m, Vec(n));
    for (auto& d : diags)
      for (double& v : d) v = rng.normal();

    // Planted nu: fixed +/- lambda on the outlier support; the free entries
    // solve (A^T nu)_j = 1 on the rank support with minimum norm.
    Vec nu(m, 0.0);
    for (int i = 0; i < ks; ++i) nu[i] = lambda * signs[i];

    // rhs_j = 1 - sum_{i < ks} a_i[j] nu_i for the planted eigendirections
    Vec rhs(kx);
    for (int j = 0; j < kx; ++j) {
      double c = 1.0;
      for (int i = 0; i < ks; ++i) c -= diags[i][j] * nu[i];
      rhs[j] = c;
    }
    // B is kx x (m - ks): B[j][i] = a_{i+ks}[j]; min-norm nu_free = B^T (B B^T)^{-1} rhs
    double b00 = 0.0, b01 = 0.0, b11 = 0.0;
    for (int i = ks; i < m; ++i) {
      b00 += diags[i][0] * diags[i][0];
      b01 += diags[i][0] * diags[i][1];
      b11 += diags[i][1] * diags[i][1];
    }
    const double det = b00 * b11 - b01 * b01;
    if (std::abs(det) < 1e-8) continue;
    const double z0 = (b11 * rhs[0] - b01 * rhs[1]) / det;
    const double z1 = (b00 * rhs[1] - b01 * rhs[0]) / det;
    bool ok = true;
    for (int i = ks; i < m; ++i) {
      nu[i] = diags[i][0] * z0 + diags[i][1] * z1;
      if (std::abs(nu[i]) > (1.0 - margin) * lambda) ok = false;
    }
    if (!ok) continue;

    // strict margin on the unplanted eigendirections: (A^T nu)_j <= 1 - margin
    for (int j = kx; j < n && ok; ++j) {
      double c = 0.0;
      for (int i = 0; i < m; ++i) c += diags[i][j] * nu[i];
      if (c > 1.0 - margin) ok = false;
    }
    if (!ok) continue;

    TheoryInstance inst{MeasurementOp::diagonal_family(diags), {}, Vec(n, 0.0),
                        Vec(m, 0.0), alpha, nu};
    for (int j = 0; j < kx; ++j) inst.x_star_diag[j] = 1.0;
    for (int i = 0; i < ks; ++i) inst.s_star[i] = signs[i];
    inst.y = inst.op.apply(SymMatrix::diagonal(inst.x_star_diag));
    for (int i = 0; i < m; ++i) inst.y[i] += inst.s_star[i];
    return inst;
  }
  throw std::runtime_error("certified instance: rejection sampling exhausted");
}

}  // namespace dop
