#pragma once

#include "dop/matrix.hpp"

namespace dop {

// Data-parallel matrix kernels. Each has a serial reference implementation
// (the ground truth for tests and the benchmark baseline) and an OpenMP
// variant. The unsuffixed entry points dispatch to OpenMP above a size
// threshold.

namespace serial {

/// C(mxn) = A(mxk) * B(kxn)
void gemm(const double* A, const double* B, double* C, int m, int k, int n);

/// S(nxn) = U(nxr) * U(nxr)^T, exactly symmetric output
void syrk(const double* U, double* S, int n, int r);

}  // namespace serial

namespace parallel {

void gemm(const double* A, const double* B, double* C, int m, int k, int n);
void syrk(const double* U, double* S, int n, int r);

}  // namespace parallel

Matrix gemm(const Matrix& a, const Matrix& b);

/// U * U^T as a flat n*n symmetric buffer
void self_outer(const Matrix& u, std::span<double> out);

/// y = M * x for row-major square M
void matvec(const Matrix& m, std::span<const double> x, std::span<double> y);

}  // namespace dop
