#pragma once

#include "dop/matrix.hpp"

namespace dop {

/// Dense symmetric n x n matrix. Entries are stored fully (row-major) and
/// kept exactly symmetric: mutation goes through set(), which writes both
/// triangles.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(int n) : m_(check_dim(n), n) {}

  /// Wraps a full dense matrix. Rejects input whose asymmetry exceeds tol
  /// (absolute, on the max entry difference).
  static SymMatrix from_dense(const Matrix& m, double tol = 0.0);

  /// (M + M^T)/2 of an arbitrary square matrix.
  static SymMatrix symmetrized(const Matrix& m);

  static SymMatrix identity(int n);
  static SymMatrix diagonal(const Vec& d);

  int n() const { return m_.rows(); }
  double operator()(int i, int j) const { return m_(i, j); }
  void set(int i, int j, double v) {
    m_(i, j) = v;
    m_(j, i) = v;
  }
  const Matrix& dense() const { return m_; }
  std::span<const double> flat() const { return m_.flat(); }

  double frobenius_norm() const { return m_.frobenius_norm(); }
  double trace() const {
    double s = 0.0;
    for (int i = 0; i < n(); ++i) s += m_(i, i);
    return s;
  }
  bool all_finite() const { return m_.all_finite(); }

  SymMatrix& operator+=(const SymMatrix& o);
  SymMatrix& operator-=(const SymMatrix& o);
  SymMatrix& operator*=(double c);
  friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
  friend SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
  friend SymMatrix operator*(double c, SymMatrix a) { return a *= c; }

 private:
  static int check_dim(int n) {
    if (n < 1) throw std::invalid_argument("SymMatrix: n must be >= 1");
    return n;
  }
  Matrix m_;
};

/// Eigendecomposition S = Q diag(values) Q^T with eigenvalues sorted
/// non-increasing and columns of Q orthonormal. Eigenvector signs are fixed
/// so the largest-magnitude component of each column is positive.
struct EigDecomp {
  Vec eigenvalues;  // non-increasing
  Matrix Q;         // columns are eigenvectors

  SymMatrix reconstruct() const;
  /// Q f(diag) Q^T for an entrywise eigenvalue map.
  SymMatrix apply_spectral(const Vec& mapped_eigenvalues) const;
};

/// Cyclic Jacobi eigendecomposition. Off-diagonal Frobenius threshold
/// 1e-12 * max(1, ||S||_F), sweep cap 100.
EigDecomp sym_eig(const SymMatrix& s);

/// Largest eigenvalue only (still via full Jacobi; sizes are small).
double max_eigenvalue(const SymMatrix& s);

/// out_i = sign(v_i) * max(|v_i| - t, 0). Requires t >= 0.
Vec soft_threshold(const Vec& v, double t);

/// Q max(lambda - t, 0) Q^T: proximal map of t*||X||_* restricted to the
/// PSD cone. Requires t >= 0.
SymMatrix psd_nuclear_prox(const SymMatrix& s, double t);

/// Matrix exponential Q exp(diag) Q^T. Throws when the top eigenvalue
/// exceeds eig_cap (exp would overflow or swamp everything else).
SymMatrix sym_exp(const SymMatrix& s, double eig_cap = 700.0);

}  // namespace dop
