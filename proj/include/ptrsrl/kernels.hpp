#pragma once

#include <cstddef>

// Dense BLAS-2 style kernels used by the autodiff graph. Each kernel has a
// serial reference and an OpenMP version; the OpenMP versions partition work
// by output element and keep the per-element summation order, so both produce
// bit-identical results.
namespace ptrsrl::kernels {

namespace serial {
/// y = W x   (W is rows x cols, row-major)
void gemv(const double* w, const double* x, double* y, int rows, int cols);
/// y += W x
void gemv_acc(const double* w, const double* x, double* y, int rows, int cols);
/// y += W^T x
void gemv_t_acc(const double* w, const double* x, double* y, int rows, int cols);
/// A += x y^T
void ger(double* a, const double* x, const double* y, int rows, int cols);
}  // namespace serial

namespace parallel {
void gemv(const double* w, const double* x, double* y, int rows, int cols);
void gemv_acc(const double* w, const double* x, double* y, int rows, int cols);
void gemv_t_acc(const double* w, const double* x, double* y, int rows, int cols);
void ger(double* a, const double* x, const double* y, int rows, int cols);
}  // namespace parallel

/// Work size (rows * cols) from which the dispatchers below use the OpenMP
/// kernels. Set to 0 to always go parallel, or to a huge value to disable.
void set_parallel_threshold(std::size_t elements);
std::size_t parallel_threshold();

void gemv(const double* w, const double* x, double* y, int rows, int cols);
void gemv_acc(const double* w, const double* x, double* y, int rows, int cols);
void gemv_t_acc(const double* w, const double* x, double* y, int rows, int cols);
void ger(double* a, const double* x, const double* y, int rows, int cols);

}  // namespace ptrsrl::kernels
