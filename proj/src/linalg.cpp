#include "dop/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dop/kernels.hpp"

namespace dop {

SymMatrix SymMatrix::from_dense(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) throw std::invalid_argument("SymMatrix: not square");
  SymMatrix s(m.rows());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = i; j < m.cols(); ++j) {
      if (std::abs(m(i, j) - m(j, i)) > tol)
        throw std::invalid_argument("SymMatrix: input not symmetric");
      s.set(i, j, m(i, j));
    }
  return s;
}

SymMatrix SymMatrix::symmetrized(const Matrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("SymMatrix: not square");
  SymMatrix s(m.rows());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = i; j < m.cols(); ++j) s.set(i, j, 0.5 * (m(i, j) + m(j, i)));
  return s;
}

SymMatrix SymMatrix::identity(int n) {
  SymMatrix s(n);
  for (int i = 0; i < n; ++i) s.set(i, i, 1.0);
  return s;
}

SymMatrix SymMatrix::diagonal(const Vec& d) {
  SymMatrix s(static_cast<int>(d.size()));
  for (int i = 0; i < s.n(); ++i) s.set(i, i, d[i]);
  return s;
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& o) {
  if (o.n() != n()) throw std::invalid_argument("SymMatrix: dimension mismatch");
  for (size_t i = 0; i < m_.flat().size(); ++i) m_.flat()[i] += o.m_.flat()[i];
  return *this;
}

SymMatrix& SymMatrix::operator-=(const SymMatrix& o) {
  if (o.n() != n()) throw std::invalid_argument("SymMatrix: dimension mismatch");
  for (size_t i = 0; i < m_.flat().size(); ++i) m_.flat()[i] -= o.m_.flat()[i];
  return *this;
}

SymMatrix& SymMatrix::operator*=(double c) {
  for (double& v : m_.flat()) v *= c;
  return *this;
}

SymMatrix EigDecomp::reconstruct() const { return apply_spectral(eigenvalues); }

SymMatrix EigDecomp::apply_spectral(const Vec& mapped) const {
  const int n = Q.rows();
  Matrix qd(n, n);  // Q * diag(mapped)
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) qd(i, k) = Q(i, k) * mapped[k];
  return SymMatrix::symmetrized(gemm(qd, Q.transposed()));
}

namespace {

double off_diag_norm(const Matrix& a) {
  double s = 0.0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

}  // namespace

EigDecomp sym_eig(const SymMatrix& s) {
  if (!s.all_finite()) throw std::invalid_argument("sym_eig: non-finite entries");
  const int n = s.n();
  Matrix a = s.dense();
  Matrix q = Matrix::identity(n);

  const double thresh = 1e-12 * std::max(1.0, s.frobenius_norm());
  constexpr int kMaxSweeps = 100;

  int sweep = 0;
  for (; sweep < kMaxSweeps && off_diag_norm(a) > thresh; ++sweep) {
    for (int p = 0; p < n - 1; ++p) {
      for (int r = p + 1; r < n; ++r) {
        const double apr = a(p, r);
        if (apr == 0.0) continue;
        const double app = a(p, p), arr = a(r, r);
        // rotation angle zeroing a(p,r)
        const double theta = (arr - app) / (2.0 * apr);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a(k, p), akr = a(k, r);
          a(k, p) = c * akp - sn * akr;
          a(k, r) = sn * akp + c * akr;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a(p, k), ark = a(r, k);
          a(p, k) = c * apk - sn * ark;
          a(r, k) = sn * apk + c * ark;
        }
        for (int k = 0; k < n; ++k) {
          const double qkp = q(k, p), qkr = q(k, r);
          q(k, p) = c * qkp - sn * qkr;
          q(k, r) = sn * qkp + c * qkr;
        }
      }
    }
  }
  if (off_diag_norm(a) > thresh)
    throw std::runtime_error("sym_eig: Jacobi did not converge, off-diagonal norm " +
                             std::to_string(off_diag_norm(a)));

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  Vec diag(n);
  for (int i = 0; i < n; ++i) diag[i] = a(i, i);
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return diag[i] > diag[j]; });

  EigDecomp out;
  out.eigenvalues.resize(n);
  out.Q = Matrix(n, n);
  for (int k = 0; k < n; ++k) {
    const int src = order[k];
    out.eigenvalues[k] = diag[src];
    int imax = 0;
    double vmax = 0.0;
    for (int i = 0; i < n; ++i)
      if (std::abs(q(i, src)) > vmax) {
        vmax = std::abs(q(i, src));
        imax = i;
      }
    const double sign = q(imax, src) >= 0.0 ? 1.0 : -1.0;
    for (int i = 0; i < n; ++i) out.Q(i, k) = sign * q(i, src);
  }
  return out;
}

double max_eigenvalue(const SymMatrix& s) { return sym_eig(s).eigenvalues.front(); }

Vec soft_threshold(const Vec& v, double t) {
  if (t < 0.0) throw std::invalid_argument("soft_threshold: negative threshold");
  Vec out(v.size());
  for (size_t i = 0; i < v.size(); ++i) {
    const double m = std::abs(v[i]) - t;
    out[i] = m > 0.0 ? (v[i] > 0.0 ? m : -m) : 0.0;
  }
  return out;
}

SymMatrix psd_nuclear_prox(const SymMatrix& s, double t) {
  if (t < 0.0) throw std::invalid_argument("psd_nuclear_prox: negative threshold");
  EigDecomp e = sym_eig(s);
  Vec mapped(e.eigenvalues.size());
  for (size_t i = 0; i < mapped.size(); ++i)
    mapped[i] = std::max(e.eigenvalues[i] - t, 0.0);
  return e.apply_spectral(mapped);
}

SymMatrix sym_exp(const SymMatrix& s, double eig_cap) {
  EigDecomp e = sym_eig(s);
  if (e.eigenvalues.front() > eig_cap)
    throw std::runtime_error("sym_exp: eigenvalue " +
                             std::to_string(e.eigenvalues.front()) +
                             " exceeds cap " + std::to_string(eig_cap));
  Vec mapped(e.eigenvalues.size());
  for (size_t i = 0; i < mapped.size(); ++i) mapped[i] = std::exp(e.eigenvalues[i]);
  return e.apply_spectral(mapped);
}

}  // namespace dop
