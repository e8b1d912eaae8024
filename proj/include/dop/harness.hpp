#pragma once

#include <optional>
#include <variant>

#include "dop/convex.hpp"
#include "dop/solver.hpp"

namespace dop {

/// Synthetic rank-r PSD ground truth plus sparse outliers:
/// X* = U* U*^T with i.i.d. N(0,1) entries of U* (n x r); s* supported on
/// round(m*p) positions drawn uniformly without replacement, values
/// i.i.d. N(0, outlier_std^2). Bit-reproducible per seed.
struct GroundTruth {
  SymMatrix X_star{1};
  Vec s_star;
  int r = 0;
  double p = 0.0;
  double outlier_std = 0.0;
  uint64_t seed = 0;
};

GroundTruth gen_ground_truth(int n, int r, double p, double outlier_std, uint64_t seed,
                             int m = 0 /* 0 means n*n (identity operator) */);

/// ||X_hat - X_star||_F / ||X_star||_F
double relative_error(const SymMatrix& x_hat, const SymMatrix& x_star);

/// Deterministic substream derivation (SplitMix64 of seed ^ mixed stream).
uint64_t derive_seed(uint64_t base_seed, uint64_t stream);

// ---------------------------------------------------------------------------
// alpha sweep
// ---------------------------------------------------------------------------

struct AlphaSweepRow {
  double alpha;
  double mean_rel_err_X;
  double mean_rel_err_s;
  int diverged;  // runs counted with error 1.0
};

struct SweepSetup {
  int n;
  int r;
  double p;
  double outlier_std = 10.0;
  double tau = 1e-4;
  double init_std = 1e-4;
  long max_iters = 20000;
};

/// One solve per (alpha, seed) on the identity operator; instances are keyed
/// by seed only, so every alpha sees the same data.
std::vector<AlphaSweepRow> alpha_sweep(const SweepSetup& setup, const Vec& alphas,
                                       const std::vector<uint64_t>& seeds);

// ---------------------------------------------------------------------------
// phase grid
// ---------------------------------------------------------------------------

struct DopMethod {
  double alpha;
  double tau = 1e-4;
  double init_std = 1e-4;
  long max_iters = 20000;
};

struct ConvexMethod {
  double lambda;
  ApgConfig apg{};  // lambda field is overwritten
};

using PhaseMethod = std::variant<DopMethod, ConvexMethod>;

struct PhaseGridResult {
  std::vector<int> r_values;
  Vec p_values;
  int trials = 0;
  // row-major |r_values| x |p_values|
  Vec success_fraction;
  Vec mean_rel_err;

  double at(size_t ri, size_t pi) const {
    return success_fraction[ri * p_values.size() + pi];
  }
};

/// Success threshold 0.1 on X. Cells run independently (OpenMP) with one RNG
/// substream per (cell, trial), so parallel and serial output bytes agree.
/// Per-cell solver failures count as unsuccessful trials, never abort.
PhaseGridResult phase_grid(int n, const std::vector<int>& r_values, const Vec& p_values,
                           int trials, const PhaseMethod& method,
                           uint64_t base_seed = 0);

// ---------------------------------------------------------------------------
// theory verification instances
// ---------------------------------------------------------------------------

/// A commuting diagonal-family instance engineered so that the convex
/// program at lambda = 1/alpha has the planted (X*, s*) as its certified
/// optimum, with all nonzero solution magnitudes equal to 1. Unit
/// magnitudes keep the finite-gamma correction of the dual certificate
/// (proportional to log of the magnitudes) at zero, which is what makes
/// tight certificate tolerances reachable at desk-scale gamma.
struct TheoryInstance {
  MeasurementOp op;
  Vec y;
  Vec x_star_diag;  // diagonal of X* in the common eigenbasis
  Vec s_star;
  double alpha;
  Vec nu_star;  // the planted dual certificate
};

/// Rejection-samples Gaussian diagonal families until the planted KKT point
/// has strict margins. Throws after max_attempts.
TheoryInstance make_certified_diagonal_instance(int n, int m, double alpha,
                                                uint64_t seed, int max_attempts = 5000);

}  // namespace dop
