#include "ptrsrl/kernels.hpp"

#include <omp.h>

#include <atomic>

namespace ptrsrl::kernels {

namespace serial {

void gemv(const double* w, const double* x, double* y, int rows, int cols) {
  for (int r = 0; r < rows; ++r) {
    const double* row = w + static_cast<std::size_t>(r) * cols;
    double acc = 0.0;
    for (int c = 0; c < cols; ++c) acc += row[c] * x[c];
    y[r] = acc;
  }
}

void gemv_acc(const double* w, const double* x, double* y, int rows, int cols) {
  for (int r = 0; r < rows; ++r) {
    const double* row = w + static_cast<std::size_t>(r) * cols;
    double acc = y[r];
    for (int c = 0; c < cols; ++c) acc += row[c] * x[c];
    y[r] = acc;
  }
}

void gemv_t_acc(const double* w, const double* x, double* y, int rows, int cols) {
  // Row streaming; y[c] still receives its terms in increasing row order.
  for (int r = 0; r < rows; ++r) {
    const double* row = w + static_cast<std::size_t>(r) * cols;
    const double xr = x[r];
    for (int c = 0; c < cols; ++c) y[c] += row[c] * xr;
  }
}

void ger(double* a, const double* x, const double* y, int rows, int cols) {
  for (int r = 0; r < rows; ++r) {
    double* row = a + static_cast<std::size_t>(r) * cols;
    const double xr = x[r];
    for (int c = 0; c < cols; ++c) row[c] += xr * y[c];
  }
}

}  // namespace serial

namespace parallel {

void gemv(const double* w, const double* x, double* y, int rows, int cols) {
#pragma omp parallel for schedule(static)
  for (int r = 0; r < rows; ++r) {
    const double* row = w + static_cast<std::size_t>(r) * cols;
    double acc = 0.0;
    for (int c = 0; c < cols; ++c) acc += row[c] * x[c];
    y[r] = acc;
  }
}

void gemv_acc(const double* w, const double* x, double* y, int rows, int cols) {
#pragma omp parallel for schedule(static)
  for (int r = 0; r < rows; ++r) {
    const double* row = w + static_cast<std::size_t>(r) * cols;
    double acc = y[r];
    for (int c = 0; c < cols; ++c) acc += row[c] * x[c];
    y[r] = acc;
  }
}

void gemv_t_acc(const double* w, const double* x, double* y, int rows, int cols) {
  // Columns are split across threads; each thread walks the rows in order.
#pragma omp parallel
  {
    const int threads = omp_get_num_threads();
    const int tid = omp_get_thread_num();
    const int chunk = (cols + threads - 1) / threads;
    const int begin = tid * chunk;
    const int end = begin + chunk < cols ? begin + chunk : cols;
    for (int r = 0; r < rows; ++r) {
      const double* row = w + static_cast<std::size_t>(r) * cols;
      const double xr = x[r];
      for (int c = begin; c < end; ++c) y[c] += row[c] * xr;
    }
  }
}

void ger(double* a, const double* x, const double* y, int rows, int cols) {
#pragma omp parallel for schedule(static)
  for (int r = 0; r < rows; ++r) {
    double* row = a + static_cast<std::size_t>(r) * cols;
    const double xr = x[r];
    for (int c = 0; c < cols; ++c) row[c] += xr * y[c];
  }
}

}  // namespace parallel

namespace {
std::atomic<std::size_t> g_threshold{1u << 16};

bool go_parallel(int rows, int cols) {
  return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols) >=
             g_threshold.load(std::memory_order_relaxed) &&
         !omp_in_parallel() && omp_get_max_threads() > 1;
}
}  // namespace

void set_parallel_threshold(std::size_t elements) { g_threshold.store(elements); }
std::size_t parallel_threshold() { return g_threshold.load(); }

void gemv(const double* w, const double* x, double* y, int rows, int cols) {
  go_parallel(rows, cols) ? parallel::gemv(w, x, y, rows, cols)
                          : serial::gemv(w, x, y, rows, cols);
}

void gemv_acc(const double* w, const double* x, double* y, int rows, int cols) {
  go_parallel(rows, cols) ? parallel::gemv_acc(w, x, y, rows, cols)
                          : serial::gemv_acc(w, x, y, rows, cols);
}

void gemv_t_acc(const double* w, const double* x, double* y, int rows, int cols) {
  go_parallel(rows, cols) ? parallel::gemv_t_acc(w, x, y, rows, cols)
                          : serial::gemv_t_acc(w, x, y, rows, cols);
}

void ger(double* a, const double* x, const double* y, int rows, int cols) {
  go_parallel(rows, cols) ? parallel::ger(a, x, y, rows, cols)
                          : serial::ger(a, x, y, rows, cols);
}

}  // namespace ptrsrl::kernels
