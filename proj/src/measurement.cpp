#include "dop/measurement.hpp"

#include <stdexcept>

#include "dop/kernels.hpp"

namespace dop {

MeasurementOp MeasurementOp::identity(int n) {
  if (n < 1) throw std::invalid_argument("MeasurementOp: n must be >= 1");
  return MeasurementOp(Kind::Identity, n, n * n);
}

MeasurementOp MeasurementOp::diagonal_family(std::vector<Vec> diagonals) {
  if (diagonals.empty()) throw std::invalid_argument("MeasurementOp: empty family");
  const int n = static_cast<int>(diagonals.front().size());
  for (const auto& d : diagonals)
    if (static_cast<int>(d.size()) != n)
      throw std::invalid_argument("MeasurementOp: inconsistent diagonal lengths");
  MeasurementOp op(Kind::DiagonalFamily, n, static_cast<int>(diagonals.size()));
  op.diags_ = std::move(diagonals);
  return op;
}

MeasurementOp MeasurementOp::general(std::vector<SymMatrix> matrices) {
  if (matrices.empty()) throw std::invalid_argument("MeasurementOp: empty family");
  const int n = matrices.front().n();
  for (const auto& a : matrices)
    if (a.n() != n) throw std::invalid_argument("MeasurementOp: inconsistent dimensions");
  MeasurementOp op(Kind::GeneralSymmetric, n, static_cast<int>(matrices.size()));
  op.mats_ = std::move(matrices);
  return op;
}

Vec MeasurementOp::apply(const SymMatrix& x) const {
  if (x.n() != n_) throw std::invalid_argument("MeasurementOp::apply: dimension mismatch");
  Vec out(m_);
  switch (kind_) {
    case Kind::Identity: {
      auto f = x.flat();
      std::copy(f.begin(), f.end(), out.begin());
      break;
    }
    case Kind::DiagonalFamily:
      for (int i = 0; i < m_; ++i) {
        double s = 0.0;
        for (int j = 0; j < n_; ++j) s += diags_[i][j] * x(j, j);
        out[i] = s;
      }
      break;
    case Kind::GeneralSymmetric:
      for (int i = 0; i < m_; ++i) out[i] = dot(mats_[i].flat(), x.flat());
      break;
  }
  return out;
}

SymMatrix MeasurementOp::adjoint(const Vec& v) const {
  if (static_cast<int>(v.size()) != m_)
    throw std::invalid_argument("MeasurementOp::adjoint: dimension mismatch");
  switch (kind_) {
    case Kind::Identity: {
      Matrix m(n_, n_);
      std::copy(v.begin(), v.end(), m.flat().begin());
      return SymMatrix::symmetrized(m);
    }
    case Kind::DiagonalFamily: {
      Vec d(n_, 0.0);
      for (int i = 0; i < m_; ++i)
        for (int j = 0; j < n_; ++j) d[j] += v[i] * diags_[i][j];
      return SymMatrix::diagonal(d);
    }
    case Kind::GeneralSymmetric: {
      SymMatrix out(n_);
      for (int i = 0; i < m_; ++i) {
        SymMatrix scaled = mats_[i];
        scaled *= v[i];
        out += scaled;
      }
      return out;
    }
  }
  throw std::logic_error("unreachable");
}

bool MeasurementOp::commutes(double tol) const {
  switch (kind_) {
    case Kind::Identity:
      return n_ == 1;
    case Kind::DiagonalFamily:
      return true;
    case Kind::GeneralSymmetric:
      return max_commutator_norm() <= tol;
  }
  return false;
}

double MeasurementOp::max_commutator_norm() const {
  if (kind_ == Kind::Identity)
    throw std::logic_error("max_commutator_norm: not defined for Identity kind");
  if (kind_ == Kind::DiagonalFamily) return 0.0;
  double worst = 0.0;
  for (size_t i = 0; i + 1 < mats_.size(); ++i)
    for (size_t j = i + 1; j < mats_.size(); ++j) {
      Matrix ab = gemm(mats_[i].dense(), mats_[j].dense());
      Matrix ba = gemm(mats_[j].dense(), mats_[i].dense());
      double s = 0.0;
      for (size_t k = 0; k < ab.flat().size(); ++k) {
        const double d = ab.flat()[k] - ba.flat()[k];
        s += d * d;
      }
      worst = std::max(worst, std::sqrt(s));
    }
  return worst;
}

}  // namespace dop
