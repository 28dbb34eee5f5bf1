#include <doctest.h>

#include <cmath>
#include <sstream>

#include "ptrsrl/analyzer.hpp"
#include "ptrsrl/error.hpp"
#include "support.hpp"

using namespace ptrsrl;

namespace {

// Least-squares slope of t = c * n, found by bisection on the sign of the
// residual derivative.
double fitted_slope(const std::vector<ComplexityRecord>& records) {
  auto derivative = [&](double c) {
    double d = 0.0;
    for (const auto& r : records) d += r.n * (c * r.n - r.transitions);
    return d;
  };
  double lo = 0.0, hi = 100.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (derivative(mid) > 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<SemGraph> corpus_at(std::uint64_t seed, int count, double ratio, int min_n,
                                int max_n) {
  std::mt19937_64 rng(seed);
  std::vector<SemGraph> out;
  for (int k = 0; k < count; ++k)
    out.push_back(testing::random_graph_by_ratio(rng, testing::uniform(rng, min_n, max_n), ratio));
  return out;
}

}  // namespace

TEST_CASE("records follow the length law") {
  const auto graphs = corpus_at(51, 300, 0.8, 1, 30);
  const Analysis a = analyze(graphs);
  REQUIRE(a.records.size() == graphs.size());
  for (std::size_t k = 0; k < graphs.size(); ++k) {
    const ComplexityRecord& r = a.records[k];
    CHECK(r.n == graphs[k].n);
    CHECK(r.arcs == static_cast<int>(graphs[k].size()));
    CHECK(r.transitions == r.n + r.arcs);
  }
  CHECK(a.stats.slope >= 1.0);
  CHECK(a.stats.slope == doctest::Approx(fitted_slope(a.records)).epsilon(1e-9));
}

TEST_CASE("English-like ratio gives slope 1.56") {
  // lengths divisible by 25 make 0.56 n an integer, so every sentence has the same ratio
  std::mt19937_64 rng(52);
  std::vector<SemGraph> graphs;
  for (int k = 0; k < 60; ++k) {
    const int n = 25 * testing::uniform(rng, 1, 3);
    graphs.push_back(testing::random_graph(rng, n, n * 14 / 25));
  }
  const Analysis a = analyze(graphs);
  CHECK(a.stats.ratio == doctest::Approx(0.56).epsilon(1e-12));
  CHECK(std::fabs(a.stats.slope - 1.56) < 1e-9);
  CHECK(bound_check(a.records, 2));

  const Analysis mixed = analyze(corpus_at(53, 500, 0.56, 5, 60));
  CHECK(std::fabs(mixed.stats.ratio - 0.56) < 0.01);
  CHECK(std::fabs(mixed.stats.slope - 1.56) < 0.01);
}

TEST_CASE("Czech-like ratio stays within three transitions per word") {
  const Analysis a = analyze(corpus_at(54, 500, 1.15, 2, 60));
  CHECK(std::fabs(a.stats.ratio - 1.15) < 0.02);
  CHECK(bound_check(a.records, 3));
  CHECK_FALSE(bound_check(a.records, 2));
}

TEST_CASE("arc-free corpus") {
  std::vector<SemGraph> graphs;
  for (int n = 1; n <= 20; ++n) {
    SemGraph g;
    g.n = n;
    graphs.push_back(g);
  }
  const Analysis a = analyze(graphs);
  CHECK(a.stats.ratio == 0.0);
  CHECK(a.stats.slope == 1.0);
  CHECK(a.stats.max_transitions == 20);
  for (const auto& r : a.records) CHECK(r.transitions == r.n);
  CHECK(bound_check(a.records, 1));
}

TEST_CASE("bound_check") {
  const Analysis example = analyze(std::vector<SemGraph>{to_graph(testing::example_sentence())});
  CHECK(example.records[0] == ComplexityRecord{8, 14, 6});
  CHECK(bound_check(example.records, 2));
  CHECK_FALSE(bound_check(example.records, 1));

  std::mt19937_64 rng(55);
  const SemGraph dense = testing::random_graph(rng, 6, 36);  // n arcs per word
  CHECK(dense.size() == 36);
  CHECK_FALSE(bound_check({measure(dense)}, 2));
  CHECK(bound_check({measure(dense)}, 7));
  CHECK(bound_check({}, 1));
  CHECK_THROWS_AS(bound_check(example.records, 0), ContractError);
}

TEST_CASE("empty corpus is rejected") {
  CHECK_THROWS_AS(analyze(std::vector<SemGraph>{}), ContractError);
  CHECK_THROWS_AS(analyze(std::vector<ComplexityRecord>{}), ContractError);
}

TEST_CASE("CSV output") {
  const Analysis a = analyze(std::vector<ComplexityRecord>{{3, 5, 2}, {4, 4, 0}});
  std::ostringstream out;
  write_csv(out, a);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "n,transitions,arcs");
  std::getline(in, line);
  CHECK(line == "3,5,2");
  std::getline(in, line);
  CHECK(line == "4,4,0");
  std::getline(in, line);
  CHECK(line == "# sentences=2");
  std::getline(in, line);
  CHECK(line == "# arcs_per_word=0.285714");
  std::getline(in, line);
  CHECK(line == "# slope=1.240000");  // (15 + 16) / (9 + 16)
  std::getline(in, line);
  CHECK(line == "# max_transitions=5");
}
