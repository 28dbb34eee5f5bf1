#pragma once

// Random corpora and small fixtures shared by the test binaries.

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ptrsrl/conll.hpp"
#include "ptrsrl/graph.hpp"

#ifndef PTRSRL_TEST_DATA
#define PTRSRL_TEST_DATA "tests/data"
#endif

using ptrsrl::Sentence;
using ptrsrl::Token;
using ptrsrl::Frame;

namespace testing {

inline std::string data_path(const std::string& name) {
  return std::string(PTRSRL_TEST_DATA) + "/" + name;
}

inline int uniform(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline bool chance(std::mt19937_64& rng, double p) {
  return std::bernoulli_distribution(p)(rng);
}

inline const std::vector<std::string>& roles() {
  static const std::vector<std::string> r = {"A0",     "A1",     "A2",     "A3",  "AM-TMP",
                                              "AM-LOC", "AM-DIS", "AM-MNR", "C-A1", "R-A0"};
  return r;
}

inline const std::vector<std::string>& words() {
  static const std::vector<std::string> w = {
      "the", "fund", "managers", "say", "they", "'re", "ready", ".", "but", "stock",
      "price", "rose", "fell", "sharply", "on", "Monday", "analysts", "expect", "a", "deal",
      "café", "naïve", "bank", "sold", "bonds", "to", "investors", "who", "wanted", "more"};
  return w;
}

inline Token make_token(int id, const std::string& form) {
  Token t;
  t.id = id;
  t.form = form;
  t.lemma = form == "managers" ? "manager" : form;
  t.plemma = t.lemma;
  t.pos = "NN";
  t.ppos = "NN";
  t.feat = "_";
  t.pfeat = "_";
  t.head = id == 1 ? 0 : 1;
  t.phead = t.head;
  t.deprel = id == 1 ? "ROOT" : "DEP";
  t.pdeprel = t.deprel;
  return t;
}

struct SentenceShape {
  double predicate_rate = 0.3;
  double arg_rate = 0.25;
  double multi_role_rate = 0.2;
  double self_role_rate = 0.3;
  int senses = 3;
};

/// Well-formed sentence with sorted frame arguments, multi-role cells and
/// self-arguments; to_graph / from_graph invert each other on it.
inline Sentence random_sentence(std::mt19937_64& rng, int n, const SentenceShape& shape = {}) {
  Sentence s;
  for (int id = 1; id <= n; ++id)
    s.tokens.push_back(make_token(id, words()[uniform(rng, 0, words().size() - 1)]));
  for (Token& t : s.tokens) {
    if (!chance(rng, shape.predicate_rate)) continue;
    t.fillpred = true;
    const std::string sense = "0" + std::to_string(uniform(rng, 1, shape.senses));
    t.pred = t.lemma + "." + sense;
    Frame f{t.id, sense, {}};
    for (int a = 1; a <= n; ++a) {
      const double rate = a == t.id ? shape.self_role_rate : shape.arg_rate;
      if (!chance(rng, rate)) continue;
      std::vector<std::string> pool = roles();
      std::shuffle(pool.begin(), pool.end(), rng);
      const int count = chance(rng, shape.multi_role_rate) ? uniform(rng, 2, 3) : 1;
      for (int k = 0; k < count; ++k) f.args.push_back({a, pool[k]});
    }
    s.frames.push_back(std::move(f));
  }
  return s;
}

/// Arbitrary single-rooted graph: `arcs` distinct (head, dependent) pairs,
/// no self-loops, labels drawn from a small pool.
inline ptrsrl::SemGraph random_graph(std::mt19937_64& rng, int n, int arcs) {
  ptrsrl::SemGraph g;
  g.n = n;
  const int capacity = n * n;  // heads 0..n minus the self-loop
  arcs = std::min(arcs, capacity);
  std::vector<std::pair<int, int>> all;
  for (int d = 1; d <= n; ++d)
    for (int h = 0; h <= n; ++h)
      if (h != d) all.push_back({h, d});
  std::shuffle(all.begin(), all.end(), rng);
  for (int k = 0; k < arcs; ++k) {
    const auto [h, d] = all[k];
    const std::string label = h == 0 ? "0" + std::to_string(uniform(rng, 1, 3))
                                     : roles()[uniform(rng, 0, roles().size() - 1)];
    g.add(h, d, label);
  }
  return g;
}

inline ptrsrl::SemGraph random_graph_by_ratio(std::mt19937_64& rng, int n, double ratio) {
  return random_graph(rng, n, static_cast<int>(ratio * n + 0.5));
}

inline Sentence example_sentence() {
  return ptrsrl::read_conll_file(data_path("example.conll")).at(0);
}

/// Sentences with varied lengths forming a small memorization corpus.
inline std::vector<Sentence> toy_corpus(std::uint64_t seed, int count, int min_n, int max_n) {
  std::mt19937_64 rng(seed);
  std::vector<Sentence> out;
  SentenceShape shape;
  shape.multi_role_rate = 0.1;
  shape.self_role_rate = 0.1;
  shape.arg_rate = 0.2;
  while (static_cast<int>(out.size()) < count) {
    Sentence s = random_sentence(rng, uniform(rng, min_n, max_n), shape);
    if (!s.frames.empty()) out.push_back(std::move(s));
  }
  return out;
}

}  // namespace testing
