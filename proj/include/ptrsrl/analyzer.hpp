#pragma once

#include <iosfwd>
#include <vector>

#include "ptrsrl/graph.hpp"

namespace ptrsrl {

struct ComplexityRecord {
  int n = 0;            // sentence length
  int transitions = 0;  // actions needed to build the graph
  int arcs = 0;

  bool operator==(const ComplexityRecord&) const = default;
};

struct CorpusStats {
  double ratio = 0.0;  // total arcs / total words
  double slope = 0.0;  // least-squares fit of transitions = slope * n through the origin
  int max_transitions = 0;
  int sentences = 0;
};

/// Transition count of a graph, measured by running the static oracle.
ComplexityRecord measure(const SemGraph& graph);

struct Analysis {
  std::vector<ComplexityRecord> records;
  CorpusStats stats;
};

/// Throws ContractError on an empty corpus.
Analysis analyze(const std::vector<SemGraph>& graphs);
Analysis analyze(const std::vector<ComplexityRecord>& records);

/// True iff transitions <= k * n for every record.
bool bound_check(const std::vector<ComplexityRecord>& records, int k);

/// Header "n,transitions,arcs", one row per record, stats as '#' comments.
void write_csv(std::ostream& out, const Analysis& analysis);

}  // namespace ptrsrl
