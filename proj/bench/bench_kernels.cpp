// Self-timed comparison of the OpenMP kernels against their serial
// references. Checks nothing; prints a table.

#include <chrono>
#include <cstdio>

#include <omp.h>

#include "mabs/alphabet.hpp"
#include "mabs/recovery.hpp"
#include "mabs/rng.hpp"
#include "mabs/separation.hpp"
#include "mabs/simulation.hpp"

namespace {

template <typename F>
double time_ms(F&& body, int repeats) {
  // one warm-up, then best of `repeats`
  body();
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto start = std::chrono::steady_clock::now();
    body();
    const auto stop = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(stop - start).count());
  }
  return best;
}

}  // namespace

int main() {
  const mabs::Alphabet a = mabs::Alphabet::from_values({0.0, 1.0, 2.0});
  std::printf("threads available: %d\n\n", omp_get_max_threads());

  std::printf("kernel: pairwise combination separation (k = 3)\n");
  std::printf("%6s %6s %12s %12s %8s\n", "m", "M", "serial ms", "openmp ms", "speedup");
  for (const int m : {2, 3, 4, 5}) {
    const mabs::Index M = 16;
    mabs::Stream rng(7u + static_cast<unsigned>(m));
    const mabs::Matrix w = mabs::sample_weights_uniform(m, M, rng);
    volatile double sink = 0.0;
    const double serial_ms = time_ms([&] { sink = mabs::serial::asb(w, a); }, 5);
    const double parallel_ms = time_ms([&] { sink = mabs::asb(w, a); }, 5);
    std::printf("%6d %6lld %12.3f %12.3f %8.2f\n", m, static_cast<long long>(M),
                serial_ms, parallel_ms, serial_ms / parallel_ms);
    (void)sink;
  }

  std::printf("\nkernel: nearest-combination decode (m = 3, k = 3)\n");
  std::printf("%6s %6s %12s %12s %8s\n", "n", "M", "serial ms", "openmp ms", "speedup");
  for (const long n : {1000L, 10000L, 100000L}) {
    const int m = 3;
    const mabs::Index M = 8;
    mabs::Stream rng(11u);
    const mabs::Matrix w = mabs::sample_weights_uniform(m, M, rng);
    const mabs::DesignMatrix design = mabs::DesignMatrix::build(a, m);
    mabs::Matrix Y(n, M);
    for (long j = 0; j < n; ++j)
      for (mabs::Index c = 0; c < M; ++c) Y(j, c) = rng.uniform();
    volatile double sink = 0.0;
    const double serial_ms =
        time_ms([&] { sink = mabs::serial::decode_rows(Y, w, design).max_residual; }, 5);
    const double parallel_ms =
        time_ms([&] { sink = mabs::decode_rows(Y, w, design).max_residual; }, 5);
    std::printf("%6ld %6lld %12.3f %12.3f %8.2f\n", n, static_cast<long long>(M),
                serial_ms, parallel_ms, serial_ms / parallel_ms);
    (void)sink;
  }
  return 0;
}
