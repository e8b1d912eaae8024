#pragma once

#include <vector>

#include "dop/linalg.hpp"

namespace dop {

/// Linear measurement operator mapping symmetric n x n matrices to R^m,
/// together with its adjoint. Three families:
///   Identity         - m = n^2, row-major entry enumeration; the adjoint
///                      symmetrizes, so apply/adjoint round-trips symmetric
///                      input exactly.
///   DiagonalFamily   - A_i = diag(a_i); pairwise commuting by construction.
///   GeneralSymmetric - arbitrary symmetric A_i, commuting or not.
class MeasurementOp {
 public:
  enum class Kind { Identity, DiagonalFamily, GeneralSymmetric };

  static MeasurementOp identity(int n);
  static MeasurementOp diagonal_family(std::vector<Vec> diagonals);
  static MeasurementOp general(std::vector<SymMatrix> matrices);

  Kind kind() const { return kind_; }
  int n() const { return n_; }
  int m() const { return m_; }

  /// Component i is <A_i, X> (Frobenius inner product).
  Vec apply(const SymMatrix& x) const;

  /// sum_i v_i A_i (symmetric). Identity kind de-enumerates and symmetrizes.
  SymMatrix adjoint(const Vec& v) const;

  /// True when the family is simultaneously diagonalizable: DiagonalFamily
  /// always, Identity only for n = 1, GeneralSymmetric when the largest
  /// pairwise commutator norm is below tol.
  bool commutes(double tol = 1e-12) const;

  /// max_{i<j} ||A_i A_j - A_j A_i||_F. Defined for DiagonalFamily (exactly
  /// 0) and GeneralSymmetric; throws for Identity, whose symmetrized basis
  /// is too large to enumerate pairwise.
  double max_commutator_norm() const;

  const std::vector<Vec>& diagonals() const { return diags_; }
  const std::vector<SymMatrix>& matrices() const { return mats_; }

 private:
  MeasurementOp(Kind k, int n, int m) : kind_(k), n_(n), m_(m) {}

  Kind kind_;
  int n_, m_;
  std::vector<Vec> diags_;       // DiagonalFamily
  std::vector<SymMatrix> mats_;  // GeneralSymmetric
};

}  // namespace dop
