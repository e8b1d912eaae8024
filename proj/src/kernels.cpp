#include "dop/kernels.hpp"

#include <cstring>
#include <stdexcept>

namespace dop {

namespace serial {

void gemm(const double* A, const double* B, double* C, int m, int k, int n) {
  std::memset(C, 0, sizeof(double) * static_cast<size_t>(m) * n);
  for (int i = 0; i < m; ++i) {
    const double* ai = A + static_cast<size_t>(i) * k;
    double* ci = C + static_cast<size_t>(i) * n;
    for (int l = 0; l < k; ++l) {
      const double a = ai[l];
      const double* bl = B + static_cast<size_t>(l) * n;
      for (int j = 0; j < n; ++j) ci[j] += a * bl[j];
    }
  }
}

void syrk(const double* U, double* S, int n, int r) {
  for (int i = 0; i < n; ++i) {
    const double* ui = U + static_cast<size_t>(i) * r;
    for (int j = i; j < n; ++j) {
      const double* uj = U + static_cast<size_t>(j) * r;
      double s = 0.0;
      for (int l = 0; l < r; ++l) s += ui[l] * uj[l];
      S[static_cast<size_t>(i) * n + j] = s;
      S[static_cast<size_t>(j) * n + i] = s;
    }
  }
}

}  // namespace serial

namespace parallel {

void gemm(const double* A, const double* B, double* C, int m, int k, int n) {
#pragma omp parallel for schedule(static)
  for (int i = 0; i < m; ++i) {
    const double* ai = A + static_cast<size_t>(i) * k;
    double* ci = C + static_cast<size_t>(i) * n;
    for (int j = 0; j < n; ++j) ci[j] = 0.0;
    for (int l = 0; l < k; ++l) {
      const double a = ai[l];
      const double* bl = B + static_cast<size_t>(l) * n;
      for (int j = 0; j < n; ++j) ci[j] += a * bl[j];
    }
  }
}

void syrk(const double* U, double* S, int n, int r) {
#pragma omp parallel for schedule(dynamic, 4)
  for (int i = 0; i < n; ++i) {
    const double* ui = U + static_cast<size_t>(i) * r;
    for (int j = i; j < n; ++j) {
      const double* uj = U + static_cast<size_t>(j) * r;
      double s = 0.0;
      for (int l = 0; l < r; ++l) s += ui[l] * uj[l];
      S[static_cast<size_t>(i) * n + j] = s;
      S[static_cast<size_t>(j) * n + i] = s;
    }
  }
}

}  // namespace parallel

namespace {
// Below this flop count the OpenMP fork/join overhead dominates.
constexpr long kParallelThreshold = 1L << 21;
}

Matrix gemm(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("gemm: dimension mismatch");
  Matrix c(a.rows(), b.cols());
  const long work = static_cast<long>(a.rows()) * a.cols() * b.cols();
  if (work >= kParallelThreshold)
    parallel::gemm(a.data(), b.data(), c.data(), a.rows(), a.cols(), b.cols());
  else
    serial::gemm(a.data(), b.data(), c.data(), a.rows(), a.cols(), b.cols());
  return c;
}

void self_outer(const Matrix& u, std::span<double> out) {
  const int n = u.rows(), r = u.cols();
  if (out.size() != static_cast<size_t>(n) * n)
    throw std::invalid_argument("self_outer: bad output size");
  const long work = static_cast<long>(n) * n * r / 2;
  if (work >= kParallelThreshold)
    parallel::syrk(u.data(), out.data(), n, r);
  else
    serial::syrk(u.data(), out.data(), n, r);
}

void matvec(const Matrix& m, std::span<const double> x, std::span<double> y) {
  if (static_cast<int>(x.size()) != m.cols() || static_cast<int>(y.size()) != m.rows())
    throw std::invalid_argument("matvec: dimension mismatch");
  for (int i = 0; i < m.rows(); ++i) {
    double s = 0.0;
    for (int j = 0; j < m.cols(); ++j) s += m(i, j) * x[j];
    y[i] = s;
  }
}

}  // namespace dop
