// Serial vs OpenMP kernel timings. Usage: bench_kernels [repeats]
#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <vector>

#include "ptrsrl/kernels.hpp"

namespace k = ptrsrl::kernels;

namespace {

using Kernel = void (*)(const double*, const double*, double*, int, int);

double seconds(Kernel f, const std::vector<double>& w, const std::vector<double>& x,
               std::vector<double>& y, int rows, int cols, int repeats) {
  const auto start = std::chrono::steady_clock::now();
  for (int r = 0; r < repeats; ++r) f(w.data(), x.data(), y.data(), rows, cols);
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void ger_serial(const double* x, const double* y, double* a, int rows, int cols) {
  k::serial::ger(a, x, y, rows, cols);
}
void ger_parallel(const double* x, const double* y, double* a, int rows, int cols) {
  k::parallel::ger(a, x, y, rows, cols);
}

}  // namespace

int main(int argc, char** argv) {
  const int repeats = argc > 1 ? std::atoi(argv[1]) : 200;
  std::printf("threads %d repeats %d\n", omp_get_max_threads(), repeats);
  std::printf("%-10s %6s %6s %12s %12s %8s %s\n", "kernel", "rows", "cols", "serial_ms",
              "parallel_ms", "speedup", "same");
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  struct Case {
    const char* name;
    Kernel serial;
    Kernel parallel;
    bool transposed;
    bool outer;
  };
  const Case cases[] = {
      {"gemv", k::serial::gemv, k::parallel::gemv, false, false},
      {"gemv_acc", k::serial::gemv_acc, k::parallel::gemv_acc, false, false},
      {"gemv_t_acc", k::serial::gemv_t_acc, k::parallel::gemv_t_acc, true, false},
      {"ger", ger_serial, ger_parallel, false, true},
  };
  for (int size : {64, 256, 1024, 2048}) {
    const int rows = size;
    const int cols = size;
    std::vector<double> w(static_cast<std::size_t>(rows) * cols);
    std::vector<double> x(cols), xt(rows);
    for (double& v : w) v = u(rng);
    for (double& v : x) v = u(rng);
    for (double& v : xt) v = u(rng);
    for (const Case& c : cases) {
      double ts = 0.0, tp = 0.0;
      bool same = true;
      if (c.outer) {
        // ger(a, x, y): a is the output; x has rows entries, y has cols.
        std::vector<double> a1(w), a2(w);
        ts = seconds(c.serial, xt, x, a1, rows, cols, repeats);
        tp = seconds(c.parallel, xt, x, a2, rows, cols, repeats);
        same = a1 == a2;
      } else {
        const std::vector<double>& in = c.transposed ? xt : x;
        std::vector<double> y1(c.transposed ? cols : rows, 0.0), y2(y1);
        ts = seconds(c.serial, w, in, y1, rows, cols, repeats);
        tp = seconds(c.parallel, w, in, y2, rows, cols, repeats);
        same = y1 == y2;
      }
      std::printf("%-10s %6d %6d %12.3f %12.3f %8.2f %s\n", c.name, rows, cols, ts * 1e3,
                  tp * 1e3, tp > 0 ? ts / tp : 0.0, same ? "yes" : "NO");
    }
  }
  return 0;
}
