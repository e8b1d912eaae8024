#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "dop/harness.hpp"

using namespace dop;

TEST_CASE("ground truth: shape, rank, and sparsity bookkeeping") {
  const GroundTruth gt = gen_ground_truth(8, 2, 0.25, 10.0, 77);
  CHECK(gt.X_star.n() == 8);
  CHECK(gt.s_star.size() == 64);

  int nnz = 0;
  for (double v : gt.s_star)
    if (v != 0.0) ++nnz;
  CHECK(nnz == 16);  // round(64 * 0.25)

  // rank r: eigenvalues beyond the r-th vanish, the first r are positive
  const EigDecomp e = sym_eig(gt.X_star);
  CHECK(e.eigenvalues[0] > 0.0);
  CHECK(e.eigenvalues[1] > 0.0);
  for (int i = 2; i < 8; ++i) CHECK(std::abs(e.eigenvalues[i]) < 1e-12);
}

TEST_CASE("p = 0 gives a clean instance") {
  const GroundTruth gt = gen_ground_truth(5, 1, 0.0, 10.0, 3);
  for (double v : gt.s_star) CHECK(v == 0.0);
}

TEST_CASE("generation is bit-reproducible and seed-sensitive") {
  const GroundTruth a = gen_ground_truth(6, 2, 0.3, 10.0, 123);
  const GroundTruth b = gen_ground_truth(6, 2, 0.3, 10.0, 123);
  for (size_t i = 0; i < a.X_star.flat().size(); ++i)
    CHECK(a.X_star.flat()[i] == b.X_star.flat()[i]);
  CHECK(a.s_star == b.s_star);

  const GroundTruth c = gen_ground_truth(6, 2, 0.3, 10.0, 124);
  CHECK(c.X_star(0, 0) != a.X_star(0, 0));
}

TEST_CASE("relative error basics") {
  const SymMatrix x = SymMatrix::diagonal({3.0, 4.0});
  CHECK(relative_error(x, x) == 0.0);
  const SymMatrix y = SymMatrix::diagonal({0.0, 0.0});
  CHECK(relative_error(y, x) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS((void)relative_error(x, y), std::invalid_argument);
}

TEST_CASE("derive_seed separates streams") {
  CHECK(derive_seed(0, 0) != derive_seed(0, 1));
  CHECK(derive_seed(0, 0) != derive_seed(1, 0));
  CHECK(derive_seed(5, 7) == derive_seed(5, 7));
}

TEST_CASE("alpha sweep runs and reports per-alpha rows") {
  SweepSetup setup;
  setup.n = 6;
  setup.r = 1;
  setup.p = 0.1;
  setup.tau = 1e-3;
  setup.max_iters = 3000;
  const auto rows = alpha_sweep(setup, {1.0, 5.0}, {0, 1});
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].alpha == 1.0);
  CHECK(rows[1].alpha == 5.0);
  for (const auto& row : rows) {
    CHECK(row.mean_rel_err_X >= 0.0);
    CHECK(row.diverged >= 0);
  }
}

TEST_CASE("phase grid: fractions are valid and deterministic") {
  const DopMethod method{std::sqrt(6.0), 1e-3, 1e-3, 3000};
  const PhaseGridResult a = phase_grid(6, {1, 3}, {0.05, 0.4}, 2, method, 9);
  CHECK(a.success_fraction.size() == 4);
  for (double f : a.success_fraction) {
    CHECK(f >= 0.0);
    CHECK(f <= 1.0);
    CHECK(f * 2 == std::floor(f * 2));  // multiples of 1/trials
  }
  const PhaseGridResult b = phase_grid(6, {1, 3}, {0.05, 0.4}, 2, method, 9);
  CHECK(a.success_fraction == b.success_fraction);
  CHECK(a.mean_rel_err == b.mean_rel_err);
}

TEST_CASE("phase grid with one trial yields 0/1 fractions") {
  const DopMethod method{std::sqrt(6.0), 1e-3, 1e-3, 2000};
  const PhaseGridResult res = phase_grid(6, {1}, {0.1}, 1, method, 4);
  CHECK((res.at(0, 0) == 0.0 || res.at(0, 0) == 1.0));
}

TEST_CASE("certified diagonal instance satisfies the planted kkt system") {
  const double alpha = 2.0;
  const TheoryInstance inst = make_certified_diagonal_instance(6, 8, alpha, 0);
  const double lambda = 1.0 / alpha;
  const int m = inst.op.m();
  const int n = inst.op.n();

  // feasibility of the plant
  const Vec ax = inst.op.apply(SymMatrix::diagonal(inst.x_star_diag));
  for (int i = 0; i < m; ++i)
    CHECK(ax[i] + inst.s_star[i] == doctest::Approx(inst.y[i]).epsilon(1e-14));

  // A*(nu) pinned to 1 on the planted eigendirections, strictly below off it
  const SymMatrix anu = inst.op.adjoint(inst.nu_star);
  for (int j = 0; j < n; ++j) {
    if (inst.x_star_diag[j] != 0.0)
      CHECK(anu(j, j) == doctest::Approx(1.0).epsilon(1e-10));
    else
      CHECK(anu(j, j) <= 0.9 + 1e-12);
  }

  // dual feasibility in the l1 block, with margin off the support
  for (int i = 0; i < m; ++i) {
    if (inst.s_star[i] != 0.0)
      CHECK(inst.nu_star[i] ==
            doctest::Approx(lambda * (inst.s_star[i] > 0 ? 1.0 : -1.0)));
    else
      CHECK(std::abs(inst.nu_star[i]) <= 0.9 * lambda + 1e-12);
  }

  // all planted magnitudes are exactly 1
  for (double v : inst.x_star_diag) CHECK((v == 0.0 || v == 1.0));
  for (double v : inst.s_star) CHECK((v == 0.0 || std::abs(v) == 1.0));

  CHECK(inst.op.commutes());
}
