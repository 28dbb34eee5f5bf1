#pragma once

#include <iosfwd>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "ptrsrl/conll.hpp"

namespace ptrsrl {

/// Scored units of one sentence: predicate senses and labeled arguments.
struct EvalItems {
  std::set<std::pair<int, std::string>> senses;
  std::set<std::tuple<int, int, std::string>> args;  // (predicate, argument, role)

  static EvalItems from(const Sentence& sentence);
};

struct Counts {
  long matched = 0;
  long predicted = 0;
  long gold = 0;

  double precision() const;
  double recall() const;
  double f1() const;
  Counts& operator+=(const Counts& o);
  bool operator==(const Counts&) const = default;
};

/// Percentages in [0, 100]; F1 is 0 when P + R is 0, P is 0 with nothing predicted.
struct ScoreReport {
  Counts senses;
  Counts args;

  Counts overall() const;
  double precision() const { return overall().precision(); }
  double recall() const { return overall().recall(); }
  double f1() const { return overall().f1(); }
  double f1_pred() const { return senses.f1(); }
  double f1_arg() const { return args.f1(); }

  ScoreReport& operator+=(const ScoreReport& o);
  void write_table(std::ostream& out) const;
  /// "key=value" lines.
  void write_keyvalue(std::ostream& out) const;
};

/// Throws EvalError when the corpora do not align.
ScoreReport score(const std::vector<Sentence>& gold, const std::vector<Sentence>& pred);

struct LengthBucket {
  int min_length = 0;
  int max_length = 0;  // inclusive
  int sentences = 0;
  ScoreReport report;
};

/// bounds are inclusive upper limits in ascending order; sentences longer
/// than the last bound fall into a final open bucket.
std::vector<LengthBucket> score_breakdown_by_length(const std::vector<Sentence>& gold,
                                                    const std::vector<Sentence>& pred,
                                                    const std::vector<int>& bounds);
void write_breakdown(std::ostream& out, const std::vector<LengthBucket>& buckets);

}  // namespace ptrsrl
