#pragma once

#include "dop/measurement.hpp"

namespace dop {

/// The five optimality residuals of the constrained program
///   min ||X||_* + lambda ||s||_1  s.t.  A(X) + s = y,  X >= 0.
struct KktResiduals {
  double feasibility;    // ||A(X) + s - y||_2 / ||y||_2
  double range;          // ||(I - A*(nu)) X||_F / max(1, ||X||_F)
  double eig_excess;     // max(0, lambda_max(A*(nu)) - 1)
  double sign_distance;  // distance of nu/lambda from sign(s), banded at 0
  double psd_violation;  // max(0, -lambda_min(X))

  double max_residual() const;
};

struct ConvexSolution {
  SymMatrix X{1};
  Vec s;
  Vec nu;  // dual estimate from the final penalty residual
  double lambda = 0.0;
  KktResiduals kkt{};
  int outer_stages = 0;
  long total_inner_iters = 0;
  bool converged = false;
};

struct ApgConfig {
  double lambda = 1.0;
  double mu_init = 0.0;   // 0: auto, 0.25 * ||y||_2
  double mu_min = 0.0;    // 0: auto, 1e-7 * ||y||_2
  double mu_decay = 0.7;  // geometric continuation factor
  double inner_tol = 1e-8;
  int max_outer = 80;
  int max_inner = 400;

  void validate() const;
};

/// Accelerated proximal gradient with penalty continuation on
///   min mu (||X||_* + lambda ||s||_1) + 1/2 ||A(X) + s - y||_2^2,
/// mu decreasing geometrically so the equality constraint tightens.
/// Function-value restarts keep the stage objective non-increasing.
ConvexSolution apg_solve(const MeasurementOp& op, const Vec& y, const ApgConfig& cfg);

KktResiduals kkt_residuals(const SymMatrix& X, const Vec& s, const Vec& nu,
                           double lambda, const MeasurementOp& op, const Vec& y);

}  // namespace dop
