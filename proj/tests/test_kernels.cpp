#include <doctest.h>

#include <omp.h>

#include <cmath>
#include <random>
#include <vector>

#include "ptrsrl/kernels.hpp"

namespace k = ptrsrl::kernels;

namespace {

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

const int kShapes[][2] = {{1, 1}, {3, 7}, {17, 5}, {64, 64}, {300, 129}, {7, 1000}};

}  // namespace

TEST_CASE("serial kernels agree with direct index arithmetic") {
  std::mt19937_64 rng(1);
  for (const auto& shape : kShapes) {
    const int rows = shape[0], cols = shape[1];
    const auto w = random_vector(rng, static_cast<std::size_t>(rows) * cols);
    const auto x = random_vector(rng, cols);
    const auto xt = random_vector(rng, rows);
    std::vector<double> y(rows), yt(cols, 0.5), a(w);
    k::serial::gemv(w.data(), x.data(), y.data(), rows, cols);
    k::serial::gemv_t_acc(w.data(), xt.data(), yt.data(), rows, cols);
    k::serial::ger(a.data(), xt.data(), x.data(), rows, cols);
    for (int r = 0; r < rows; ++r) {
      double expect = 0.0;
      for (int c = 0; c < cols; ++c) expect += w[r * cols + c] * x[c];
      CHECK(y[r] == doctest::Approx(expect).epsilon(1e-12));
      for (int c = 0; c < cols; ++c)
        CHECK(a[r * cols + c] == doctest::Approx(w[r * cols + c] + xt[r] * x[c]).epsilon(1e-12));
    }
    for (int c = 0; c < cols; ++c) {
      double expect = 0.5;
      for (int r = 0; r < rows; ++r) expect += w[r * cols + c] * xt[r];
      CHECK(yt[c] == doctest::Approx(expect).epsilon(1e-12));
    }
  }
}

TEST_CASE("OpenMP kernels are bit-identical to the serial reference") {
  std::mt19937_64 rng(2);
  for (int threads : {1, 2, 3, 8}) {
    omp_set_num_threads(threads);
    for (const auto& shape : kShapes) {
      const int rows = shape[0], cols = shape[1];
      const auto w = random_vector(rng, static_cast<std::size_t>(rows) * cols);
      const auto x = random_vector(rng, cols);
      const auto xt = random_vector(rng, rows);
      const auto y0 = random_vector(rng, rows);
      const auto yt0 = random_vector(rng, cols);

      std::vector<double> s(rows), p(rows);
      k::serial::gemv(w.data(), x.data(), s.data(), rows, cols);
      k::parallel::gemv(w.data(), x.data(), p.data(), rows, cols);
      CHECK(s == p);

      s = y0, p = y0;
      k::serial::gemv_acc(w.data(), x.data(), s.data(), rows, cols);
      k::parallel::gemv_acc(w.data(), x.data(), p.data(), rows, cols);
      CHECK(s == p);

      s = yt0, p = yt0;
      k::serial::gemv_t_acc(w.data(), xt.data(), s.data(), rows, cols);
      k::parallel::gemv_t_acc(w.data(), xt.data(), p.data(), rows, cols);
      CHECK(s == p);

      s = w, p = w;
      k::serial::ger(s.data(), xt.data(), x.data(), rows, cols);
      k::parallel::ger(p.data(), xt.data(), x.data(), rows, cols);
      CHECK(s == p);
    }
  }
  omp_set_num_threads(omp_get_num_procs());
}

TEST_CASE("dispatch threshold does not change results") {
  std::mt19937_64 rng(3);
  const int rows = 90, cols = 80;
  const auto w = random_vector(rng, rows * cols);
  const auto x = random_vector(rng, cols);
  const std::size_t saved = k::parallel_threshold();
  std::vector<double> a(rows), b(rows);
  k::set_parallel_threshold(0);
  k::gemv(w.data(), x.data(), a.data(), rows, cols);
  k::set_parallel_threshold(static_cast<std::size_t>(-1));
  k::gemv(w.data(), x.data(), b.data(), rows, cols);
  k::set_parallel_threshold(saved);
  CHECK(a == b);
  CHECK(k::parallel_threshold() == saved);
}

TEST_CASE("nested use inside a parallel region stays correct") {
  std::mt19937_64 rng(4);
  const int rows = 50, cols = 40;
  const auto w = random_vector(rng, rows * cols);
  const auto x = random_vector(rng, cols);
  std::vector<double> expect(rows);
  k::serial::gemv(w.data(), x.data(), expect.data(), rows, cols);
  const std::size_t saved = k::parallel_threshold();
  k::set_parallel_threshold(0);
  std::vector<std::vector<double>> out(8, std::vector<double>(rows));
#pragma omp parallel for num_threads(4)
  for (int t = 0; t < 8; ++t) k::gemv(w.data(), x.data(), out[t].data(), rows, cols);
  k::set_parallel_threshold(saved);
  for (const auto& y : out) CHECK(y == expect);
}
