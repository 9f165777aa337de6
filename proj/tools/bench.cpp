// Timing harness comparing the OpenMP kernels against their serial
// reference implementations: generator assembly, uniformization spmv, and
// Gillespie sampling. Usage: occnum_bench [threads]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "occnum/generator.hpp"
#include "occnum/ssa.hpp"

using namespace occnum;

namespace {

using Clock = std::chrono::steady_clock;

template <typename F>
double time_ms(F&& body, int reps = 1) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = Clock::now();
    body();
    const auto t1 = Clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

void report(const char* name, double serial_ms, double parallel_ms) {
  std::printf("%-24s serial %9.2f ms   parallel %9.2f ms   speedup %.2fx\n", name,
              serial_ms, parallel_ms, serial_ms / parallel_ms);
}

}  // namespace

int main(int argc, char** argv) {
  const int threads = argc > 1 ? std::atoi(argv[1]) : 0;
  std::printf("workers: %d\n", resolve_thread_count(threads));

  {  // generator assembly on a ~160k-state box
    const auto spec = builtin_model(BuiltinModel::LotkaVolterra, {2.0, 2.2});
    const auto lattice = enumerate_states(spec, {399, 399});
    SparseGenerator keep;
    const double serial_ms =
        time_ms([&] { keep = build_generator_serial(spec, lattice); }, 2);
    const double parallel_ms =
        time_ms([&] { keep = build_generator(spec, lattice, threads); }, 2);
    report("generator assembly", serial_ms, parallel_ms);

    std::vector<double> x(keep.dim, 1.0 / keep.dim), y(keep.dim);
    const int reps = 50;
    const double spmv_serial_ms = time_ms([&] {
      for (int r = 0; r < reps; ++r) spmv_serial(keep, x, y);
    });
    const double spmv_parallel_ms = time_ms([&] {
      for (int r = 0; r < reps; ++r) spmv(keep, x, y, threads);
    });
    report("spmv x50", spmv_serial_ms, spmv_parallel_ms);
  }

  {  // Gillespie endpoint sampling
    const auto spec = builtin_model(BuiltinModel::Cannibal, {1.0, 0.9});
    const OccState init{24, 6};
    const double serial_ms =
        time_ms([&] { (void)sample_trajectories_serial(spec, init, 1.0, 40000, 7); });
    const double parallel_ms =
        time_ms([&] { (void)sample_trajectories(spec, init, 1.0, 40000, 7, threads); });
    report("ssa 40k trajectories", serial_ms, parallel_ms);
  }
  return 0;
}
