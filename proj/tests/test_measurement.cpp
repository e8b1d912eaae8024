#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "dop/measurement.hpp"
#include "dop/rng.hpp"

using namespace dop;

namespace {

SymMatrix random_sym(int n, Rng& rng) {
  SymMatrix s(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) s.set(i, j, rng.normal());
  return s;
}

double frob_inner(const SymMatrix& a, const SymMatrix& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.flat().size(); ++i) s += a.flat()[i] * b.flat()[i];
  return s;
}

// <A(X), v> == <X, A*(v)> for every X, v
void check_adjoint(const MeasurementOp& op, Rng& rng, int reps) {
  for (int rep = 0; rep < reps; ++rep) {
    const SymMatrix x = random_sym(op.n(), rng);
    Vec v(op.m());
    for (double& e : v) e = rng.normal();
    const Vec ax = op.apply(x);
    double lhs = 0.0;
    for (int i = 0; i < op.m(); ++i) lhs += ax[i] * v[i];
    const double rhs = frob_inner(x, op.adjoint(v));
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(lhs)));
  }
}

}  // namespace

TEST_CASE("adjoint identity holds for all operator kinds") {
  Rng rng(21);
  check_adjoint(MeasurementOp::identity(5), rng, 100);

  std::vector<Vec> diags(7, Vec(5));
  for (auto& d : diags)
    for (double& v : d) v = rng.normal();
  check_adjoint(MeasurementOp::diagonal_family(diags), rng, 100);

  std::vector<SymMatrix> mats;
  for (int i = 0; i < 6; ++i) mats.push_back(random_sym(5, rng));
  check_adjoint(MeasurementOp::general(mats), rng, 100);
}

TEST_CASE("identity operator round-trips symmetric matrices exactly") {
  Rng rng(22);
  const MeasurementOp op = MeasurementOp::identity(4);
  CHECK(op.m() == 16);
  const SymMatrix x = random_sym(4, rng);
  const SymMatrix back = op.adjoint(op.apply(x));
  for (size_t i = 0; i < x.flat().size(); ++i) CHECK(back.flat()[i] == x.flat()[i]);
}

TEST_CASE("identity apply enumerates entries row-major") {
  SymMatrix x(2);
  x.set(0, 0, 1.0);
  x.set(0, 1, 2.0);
  x.set(1, 1, 3.0);
  const Vec v = MeasurementOp::identity(2).apply(x);
  CHECK(v == Vec{1.0, 2.0, 2.0, 3.0});
}

TEST_CASE("commutation detection") {
  Rng rng(23);
  std::vector<Vec> diags(4, Vec(3));
  for (auto& d : diags)
    for (double& v : d) v = rng.normal();
  const MeasurementOp diag_op = MeasurementOp::diagonal_family(diags);
  CHECK(diag_op.commutes());
  CHECK(diag_op.max_commutator_norm() == 0.0);

  // a commuting general family: polynomials of one matrix
  const SymMatrix base = random_sym(3, rng);
  SymMatrix sq(3);
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      double v = 0.0;
      for (int k = 0; k < 3; ++k) v += base(i, k) * base(k, j);
      sq.set(i, j, v);
    }
  CHECK(MeasurementOp::general({base, sq}).commutes(1e-10));

  // generic pairs do not commute
  const MeasurementOp noncomm = MeasurementOp::general({base, random_sym(3, rng)});
  CHECK_FALSE(noncomm.commutes());
  CHECK(noncomm.max_commutator_norm() > 0.1);

  CHECK(MeasurementOp::identity(1).commutes());
  CHECK_FALSE(MeasurementOp::identity(3).commutes());
  CHECK_THROWS_AS((void)MeasurementOp::identity(3).max_commutator_norm(),
                  std::logic_error);
}

TEST_CASE("diagonal family apply matches explicit inner products") {
  Rng rng(24);
  std::vector<Vec> diags(3, Vec(4));
  for (auto& d : diags)
    for (double& v : d) v = rng.normal();
  const MeasurementOp op = MeasurementOp::diagonal_family(diags);
  const SymMatrix x = random_sym(4, rng);
  const Vec got = op.apply(x);
  for (int i = 0; i < 3; ++i) {
    double want = 0.0;
    for (int j = 0; j < 4; ++j) want += diags[i][j] * x(j, j);
    CHECK(got[i] == doctest::Approx(want).epsilon(1e-14));
  }
}

TEST_CASE("dimension mismatches throw") {
  const MeasurementOp op = MeasurementOp::identity(3);
  CHECK_THROWS_AS((void)op.apply(SymMatrix(2)), std::invalid_argument);
  CHECK_THROWS_AS((void)op.adjoint(Vec(4)), std::invalid_argument);
}
