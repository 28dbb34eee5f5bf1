#include "ptrsrl/scorer.hpp"

#include <algorithm>
#include <cstdio>
#include <exception>
#include <limits>
#include <ostream>

#include "ptrsrl/error.hpp"

namespace ptrsrl {

EvalItems EvalItems::from(const Sentence& sentence) {
  EvalItems items;
  for (const Frame& f : sentence.frames) {
    if (!f.sense.empty()) items.senses.insert({f.predicate, f.sense});
    for (const Argument& a : f.args) items.args.insert({f.predicate, a.position, a.role});
  }
  return items;
}

double Counts::precision() const { return predicted ? 100.0 * matched / predicted : 0.0; }
double Counts::recall() const { return gold ? 100.0 * matched / gold : 0.0; }
double Counts::f1() const {
  const double p = precision();
  const double r = recall();
  return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
}

Counts& Counts::operator+=(const Counts& o) {
  matched += o.matched;
  predicted += o.predicted;
  gold += o.gold;
  return *this;
}

Counts ScoreReport::overall() const {
  Counts c = senses;
  c += args;
  return c;
}

ScoreReport& ScoreReport::operator+=(const ScoreReport& o) {
  senses += o.senses;
  args += o.args;
  return *this;
}

namespace {

template <class Set>
Counts count(const Set& gold, const Set& pred) {
  Counts c;
  c.gold = static_cast<long>(gold.size());
  c.predicted = static_cast<long>(pred.size());
  for (const auto& item : pred) c.matched += gold.count(item) ? 1 : 0;
  return c;
}

ScoreReport score_pair(const Sentence& gold, const Sentence& pred, std::size_t index) {
  if (gold.size() != pred.size())
    throw EvalError(index, "gold has " + std::to_string(gold.size()) + " tokens, prediction " +
                               std::to_string(pred.size()));
  const EvalItems g = EvalItems::from(gold);
  const EvalItems p = EvalItems::from(pred);
  ScoreReport r;
  r.senses = count(g.senses, p.senses);
  r.args = count(g.args, p.args);
  return r;
}

void check_counts(const std::vector<Sentence>& gold, const std::vector<Sentence>& pred) {
  if (gold.size() != pred.size())
    throw EvalError(std::min(gold.size(), pred.size()),
                    "gold has " + std::to_string(gold.size()) + " sentences, prediction " +
                        std::to_string(pred.size()));
}

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

ScoreReport score(const std::vector<Sentence>& gold, const std::vector<Sentence>& pred) {
  check_counts(gold, pred);
  const long count = static_cast<long>(gold.size());
  std::vector<ScoreReport> per_sentence(gold.size());
  std::exception_ptr error;
#pragma omp parallel for schedule(static)
  for (long k = 0; k < count; ++k) {
    try {
      per_sentence[k] = score_pair(gold[k], pred[k], k);
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  ScoreReport total;
  for (const ScoreReport& r : per_sentence) total += r;
  return total;
}

std::vector<LengthBucket> score_breakdown_by_length(const std::vector<Sentence>& gold,
                                                    const std::vector<Sentence>& pred,
                                                    const std::vector<int>& bounds) {
  check_counts(gold, pred);
  std::vector<LengthBucket> buckets;
  int low = 1;
  for (int b : bounds) {
    buckets.push_back({low, b, 0, {}});
    low = b + 1;
  }
  buckets.push_back({low, std::numeric_limits<int>::max(), 0, {}});
  for (std::size_t k = 0; k < gold.size(); ++k) {
    const ScoreReport r = score_pair(gold[k], pred[k], k);
    const int n = static_cast<int>(gold[k].size());
    auto it = std::find_if(buckets.begin(), buckets.end(),
                           [n](const LengthBucket& b) { return n <= b.max_length; });
    it->report += r;
    ++it->sentences;
  }
  return buckets;
}

void ScoreReport::write_table(std::ostream& out) const {
  auto row = [&](const char* name, const Counts& c) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-10s %8ld %8ld %8ld %7s %7s %7s\n", name, c.matched,
                  c.predicted, c.gold, pct(c.precision()).c_str(), pct(c.recall()).c_str(),
                  pct(c.f1()).c_str());
    out << buf;
  };
  char head[160];
  std::snprintf(head, sizeof(head), "%-10s %8s %8s %8s %7s %7s %7s\n", "category", "matched",
                "pred", "gold", "P", "R", "F1");
  out << head;
  row("senses", senses);
  row("arguments", args);
  row("overall", overall());
}

void ScoreReport::write_keyvalue(std::ostream& out) const {
  const Counts o = overall();
  out << "P=" << pct(o.precision()) << '\n'
      << "R=" << pct(o.recall()) << '\n'
      << "F1=" << pct(o.f1()) << '\n'
      << "F1_pred=" << pct(senses.f1()) << '\n'
      << "F1_arg=" << pct(args.f1()) << '\n'
      << "matched=" << o.matched << '\n'
      << "predicted=" << o.predicted << '\n'
      << "gold=" << o.gold << '\n'
      << "sense_matched=" << senses.matched << '\n'
      << "sense_predicted=" << senses.predicted << '\n'
      << "sense_gold=" << senses.gold << '\n'
      << "arg_matched=" << args.matched << '\n'
      << "arg_predicted=" << args.predicted << '\n'
      << "arg_gold=" << args.gold << '\n';
}

void write_breakdown(std::ostream& out, const std::vector<LengthBucket>& buckets) {
  char head[160];
  std::snprintf(head, sizeof(head), "%-12s %9s %7s %7s %7s %7s %7s\n", "length", "sentences",
                "P", "R", "F1", "F1_pred", "F1_arg");
  out << head;
  for (const LengthBucket& b : buckets) {
    std::string range = std::to_string(b.min_length) + "-" +
                        (b.max_length == std::numeric_limits<int>::max()
                             ? std::string("")
                             : std::to_string(b.max_length));
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-12s %9d %7s %7s %7s %7s %7s\n", range.c_str(),
                  b.sentences, pct(b.report.precision()).c_str(), pct(b.report.recall()).c_str(),
                  pct(b.report.f1()).c_str(), pct(b.report.f1_pred()).c_str(),
                  pct(b.report.f1_arg()).c_str());
    out << buf;
  }
}

}  // namespace ptrsrl
