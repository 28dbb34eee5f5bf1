#include "ptrsrl/analyzer.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

#include "ptrsrl/error.hpp"
#include "ptrsrl/transition.hpp"

namespace ptrsrl {

ComplexityRecord measure(const SemGraph& graph) {
  return {graph.n, static_cast<int>(oracle(graph).size()), static_cast<int>(graph.size())};
}

Analysis analyze(const std::vector<ComplexityRecord>& records) {
  if (records.empty()) throw ContractError("analyze: empty corpus");
  Analysis a;
  a.records = records;
  long words = 0, arcs = 0;
  double nt = 0.0, nn = 0.0;
  for (const ComplexityRecord& r : records) {
    words += r.n;
    arcs += r.arcs;
    nt += static_cast<double>(r.n) * r.transitions;
    nn += static_cast<double>(r.n) * r.n;
    a.stats.max_transitions = std::max(a.stats.max_transitions, r.transitions);
  }
  a.stats.sentences = static_cast<int>(records.size());
  a.stats.ratio = words ? static_cast<double>(arcs) / words : 0.0;
  a.stats.slope = nn > 0.0 ? nt / nn : 0.0;
  return a;
}

Analysis analyze(const std::vector<SemGraph>& graphs) {
  std::vector<ComplexityRecord> records(graphs.size());
  const long count = static_cast<long>(graphs.size());
#pragma omp parallel for schedule(static)
  for (long k = 0; k < count; ++k) records[k] = measure(graphs[k]);
  return analyze(records);
}

bool bound_check(const std::vector<ComplexityRecord>& records, int k) {
  if (k < 1) throw ContractError("bound_check: k must be at least 1");
  return std::all_of(records.begin(), records.end(), [k](const ComplexityRecord& r) {
    return static_cast<long>(r.transitions) <= static_cast<long>(k) * r.n;
  });
}

void write_csv(std::ostream& out, const Analysis& analysis) {
  out << "n,transitions,arcs\n";
  for (const ComplexityRecord& r : analysis.records)
    out << r.n << ',' << r.transitions << ',' << r.arcs << '\n';
  char buf[64];
  out << "# sentences=" << analysis.stats.sentences << '\n';
  std::snprintf(buf, sizeof(buf), "%.6f", analysis.stats.ratio);
  out << "# arcs_per_word=" << buf << '\n';
  std::snprintf(buf, sizeof(buf), "%.6f", analysis.stats.slope);
  out << "# slope=" << buf << '\n';
  out << "# max_transitions=" << analysis.stats.max_transitions << '\n';
}

}  // namespace ptrsrl
