#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

#include "dop/measurement.hpp"

namespace dop {

/// Thrown when an iterate leaves the configured magnitude cap or turns
/// non-finite.
struct DivergenceError : std::runtime_error {
  DivergenceError(long iter_, double max_magnitude_)
      : std::runtime_error("solver diverged at iteration " + std::to_string(iter_) +
                           ", max magnitude " + std::to_string(max_magnitude_)),
        iter(iter_),
        max_magnitude(max_magnitude_) {}
  long iter;
  double max_magnitude;
};

/// U0 = gamma * [I; 0], g0 = h0 = gamma * 1 (the flow-theory initialization).
struct TheoryGamma {
  double gamma;
};

/// U, g entries i.i.d. N(0, sigma^2); h copied from g.
struct GaussianStd {
  double sigma;
  uint64_t seed;
};

struct SolverConfig {
  int r_prime = 0;  // 0 means full over-parameterization r' = n
  double tau = 1e-4;
  double alpha = 1.0;
  long max_iters = 20000;
  std::variant<TheoryGamma, GaussianStd> init = GaussianStd{1e-4, 0};
  double stop_tol_rel = 1e-8;  // on ||residual||_2, relative to ||y||_2
  double overflow_cap = 1e12;
  long snapshot_stride = 0;  // 0 means max(1, max_iters / 200)

  void validate(int n) const;
};

/// The over-parameterized iterate: X = U U^T, s = g.g - h.h, plus the
/// accumulated negated tau-weighted residual sum xi (the discrete flow
/// integral).
struct FactorState {
  Matrix U;  // n x r'
  Vec g, h;  // length m
  Vec xi;    // length m
  long k = 0;

  int n() const { return U.rows(); }
  int r_prime() const { return U.cols(); }
  int m() const { return static_cast<int>(g.size()); }

  SymMatrix X() const;
  Vec s() const;
  double max_abs() const;
};

struct Snapshot {
  long k;
  Matrix U;
  Vec g, h, xi;
};

struct RecoveryResult {
  SymMatrix X_hat{1};
  Vec s_hat;
  Vec xi_inf;
  std::vector<std::pair<long, double>> loss_history;  // (iteration, loss)
  long iters_run = 0;
  bool converged = false;
  double gh_product_maxabs = 0.0;
  std::vector<Snapshot> snapshots;  // populated when requested
};

FactorState init_state(int n, int m, const SolverConfig& cfg);

/// r = A(U U^T) + g.g - h.h - y
Vec residual(const FactorState& st, const MeasurementOp& op, const Vec& y);

/// 1/4 ||residual||_2^2
double loss(const FactorState& st, const MeasurementOp& op, const Vec& y);

/// One gradient step with learning rates (tau, alpha*tau):
///   U <- U - tau A*(r) U,  g <- g - alpha tau r.g,  h <- h + alpha tau r.h,
///   xi <- xi - tau r,  k <- k + 1.
void gd_step(FactorState& st, const MeasurementOp& op, const Vec& y, double tau,
             double alpha);

/// Runs gd_step until ||residual||_2 <= stop_tol_rel * ||y||_2 or max_iters.
RecoveryResult solve(const MeasurementOp& op, const Vec& y, const SolverConfig& cfg,
                     bool record_snapshots = false);

/// nu(gamma) = xi_inf / log(1/gamma). Requires 0 < gamma < 1.
Vec dual_certificate(const Vec& xi_inf, double gamma);

/// Residuals of the optimality conditions the flow limit is expected to
/// satisfy, all computed from the dual certificate built out of xi_inf.
struct TheoremReport {
  double feasibility;     // ||A(X) + s - y||_2
  double eig_excess;      // lambda_max(A*(nu)) - 1 (signed)
  double range_residual;  // ||(I - A*(nu)) X||_F / ||X||_F
  double sign_residual;   // worst deviation of alpha*nu from sign(s)
  double gh_rel;          // max_i |g_i h_i| / gamma^2

  bool pass(double tol, double gh_cap = 2.0) const {
    return feasibility <= tol && eig_excess <= tol && range_residual <= tol &&
           sign_residual <= tol && gh_rel <= gh_cap;
  }
};

TheoremReport verify_theorem1(const RecoveryResult& res, const MeasurementOp& op,
                              const Vec& y, double alpha, double gamma, double tol);

/// Max relative deviation, over snapshots, of the commuting-family closed
/// forms X_t = exp(A*(xi)) X_0 exp(A*(xi)), g_t = g_0 . exp(alpha xi),
/// h_t = h_0 . exp(-alpha xi). Valid for TheoryGamma runs.
double check_flow_closed_form(const std::vector<Snapshot>& snapshots,
                              const MeasurementOp& op, double gamma, double alpha);

}  // namespace dop
