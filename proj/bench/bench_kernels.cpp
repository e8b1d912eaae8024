// Compares the serial reference kernels against the OpenMP ones and checks
// they produce identical bytes. Sizes cover the shapes the solver hits.
#include <chrono>
#include <cstdio>
#include <cstring>

#include "dop/kernels.hpp"
#include "dop/rng.hpp"

using namespace dop;

namespace {

Matrix random_matrix(int rows, int cols, Rng& rng) {
  Matrix m(rows, cols);
  for (double& v : m.flat()) v = rng.normal();
  return m;
}

template <class F>
double time_best_of(int reps, F&& f) {
  double best = 1e300;
  for (int i = 0; i < reps; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
  }
  return best;
}

}  // namespace

int main() {
  Rng rng(7);
  std::printf("%-28s %10s %10s %8s %s\n", "kernel", "serial(s)", "parallel(s)",
              "speedup", "match");

  for (int n : {50, 100, 200, 400}) {
    const Matrix a = random_matrix(n, n, rng);
    const Matrix b = random_matrix(n, n, rng);
    Matrix c1(n, n), c2(n, n);
    const double ts = time_best_of(3, [&] { serial::gemm(a.data(), b.data(), c1.data(), n, n, n); });
    const double tp = time_best_of(3, [&] { parallel::gemm(a.data(), b.data(), c2.data(), n, n, n); });
    const bool same =
        std::memcmp(c1.data(), c2.data(), sizeof(double) * n * n) == 0;
    std::printf("gemm %dx%d                 %10.4f %10.4f %8.2f %s\n", n, n, ts,
                tp, ts / tp, same ? "yes" : "NO");
  }

  for (int n : {50, 100, 200, 400}) {
    const Matrix u = random_matrix(n, n, rng);
    Vec o1(static_cast<size_t>(n) * n), o2(o1.size());
    const double ts = time_best_of(3, [&] { serial::syrk(u.data(), o1.data(), n, n); });
    const double tp = time_best_of(3, [&] { parallel::syrk(u.data(), o2.data(), n, n); });
    const bool same =
        std::memcmp(o1.data(), o2.data(), sizeof(double) * o1.size()) == 0;
    std::printf("syrk %dx%d                 %10.4f %10.4f %8.2f %s\n", n, n, ts,
                tp, ts / tp, same ? "yes" : "NO");
  }
  return 0;
}
