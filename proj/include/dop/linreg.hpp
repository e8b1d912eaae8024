#pragma once

#include "dop/linalg.hpp"

namespace dop {

/// Underdetermined least squares W theta = b with per-coordinate learning
/// rate weights (positive diagonal Lambda).
struct LinRegProblem {
  Matrix W;     // n1 x n2, n2 > n1, full row rank
  Vec b;        // length n1
  Vec weights;  // length n2, all > 0 (Lambda diagonal)

  void validate() const;
};

/// theta = W^T (W W^T)^{-1} b
Vec min_norm_solution(const LinRegProblem& p);

/// argmin 1/2 ||Lambda^{-1/2} theta||^2 s.t. W theta = b,
/// closed form Lambda W^T (W Lambda W^T)^{-1} b.
Vec weighted_min_norm_solution(const LinRegProblem& p);

/// theta_{k+1} = theta_k - tau Lambda W^T (W theta_k - b). Checks the
/// spectral step bound tau < 1/||W Lambda W^T|| by power iteration and
/// throws on violation or divergence.
Vec weighted_gd(const LinRegProblem& p, double tau, long iters, Vec theta0);

/// ||W Lambda W^T||_2 estimated by power iteration (for step-size bounds).
double gram_spectral_norm(const LinRegProblem& p);

}  // namespace dop
