#include "dop/linreg.hpp"

#include <cmath>

#include "dop/kernels.hpp"

namespace dop {

namespace {

/// W diag(w) W^T as a SymMatrix (w empty means identity weights).
SymMatrix weighted_gram(const Matrix& w_mat, const Vec& w) {
  const int n1 = w_mat.rows(), n2 = w_mat.cols();
  SymMatrix g(n1);
  for (int i = 0; i < n1; ++i)
    for (int j = i; j < n1; ++j) {
      double s = 0.0;
      for (int k = 0; k < n2; ++k) {
        const double wk = w.empty() ? 1.0 : w[k];
        s += w_mat(i, k) * wk * w_mat(j, k);
      }
      g.set(i, j, s);
    }
  return g;
}

/// Solve G z = b through the eigendecomposition pseudo-inverse; rejects
/// rank-deficient G.
Vec gram_solve(const SymMatrix& g, const Vec& b) {
  const EigDecomp e = sym_eig(g);
  if (e.eigenvalues.back() <= 1e-10 * std::max(1.0, e.eigenvalues.front()))
    throw std::invalid_argument("linreg: W is not full row rank");
  const int n = g.n();
  Vec qtb(n, 0.0);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i) qtb[k] += e.Q(i, k) * b[i];
  Vec z(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) z[i] += e.Q(i, k) * qtb[k] / e.eigenvalues[k];
  return z;
}

}  // namespace

void LinRegProblem::validate() const {
  if (W.cols() <= W.rows())
    throw std::invalid_argument("LinRegProblem: need n2 > n1 (underdetermined)");
  if (static_cast<int>(b.size()) != W.rows())
    throw std::invalid_argument("LinRegProblem: b length mismatch");
  if (static_cast<int>(weights.size()) != W.cols())
    throw std::invalid_argument("LinRegProblem: weights length mismatch");
  for (double w : weights)
    if (!(w > 0.0)) throw std::invalid_argument("LinRegProblem: weights must be > 0");
}

Vec min_norm_solution(const LinRegProblem& p) {
  p.validate();
  const Vec z = gram_solve(weighted_gram(p.W, {}), p.b);
  Vec theta(p.W.cols(), 0.0);
  for (int k = 0; k < p.W.cols(); ++k)
    for (int i = 0; i < p.W.rows(); ++i) theta[k] += p.W(i, k) * z[i];
  return theta;
}

Vec weighted_min_norm_solution(const LinRegProblem& p) {
  p.validate();
  const Vec z = gram_solve(weighted_gram(p.W, p.weights), p.b);
  Vec theta(p.W.cols(), 0.0);
  for (int k = 0; k < p.W.cols(); ++k)
    for (int i = 0; i < p.W.rows(); ++i) theta[k] += p.weights[k] * p.W(i, k) * z[i];
  return theta;
}

double gram_spectral_norm(const LinRegProblem& p) {
  const SymMatrix g = weighted_gram(p.W, p.weights);
  Vec v(g.n(), 1.0 / std::sqrt(static_cast<double>(g.n())));
  double lam = 0.0;
  for (int it = 0; it < 100; ++it) {
    Vec w(g.n(), 0.0);
    matvec(g.dense(), v, w);
    lam = norm2(w);
    if (lam == 0.0) return 0.0;
    for (double& x : w) x /= lam;
    v = std::move(w);
  }
  return lam;
}

Vec weighted_gd(const LinRegProblem& p, double tau, long iters, Vec theta) {
  p.validate();
  if (static_cast<int>(theta.size()) != p.W.cols())
    throw std::invalid_argument("weighted_gd: theta0 length mismatch");
  const double bound = gram_spectral_norm(p);
  if (!(tau > 0.0) || tau * bound >= 1.0)
    throw std::invalid_argument("weighted_gd: tau violates the spectral step bound");

  const double bnorm = norm2(p.b);
  Vec r(p.W.rows());
  for (long k = 0; k < iters; ++k) {
    matvec(p.W, theta, r);
    for (size_t i = 0; i < r.size(); ++i) r[i] -= p.b[i];
    if (norm2(r) <= 1e-10 * std::max(bnorm, 1e-300)) break;
    for (int j = 0; j < p.W.cols(); ++j) {
      double grad = 0.0;
      for (int i = 0; i < p.W.rows(); ++i) grad += p.W(i, j) * r[i];
      theta[j] -= tau * p.weights[j] * grad;
    }
    if (!std::isfinite(norm_inf(theta)) || norm_inf(theta) > 1e12)
      throw std::runtime_error("weighted_gd: diverged");
  }
  return theta;
}

}  // namespace dop
