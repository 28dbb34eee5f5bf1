#pragma once

#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ptrsrl/graph.hpp"

namespace ptrsrl {

/// Parser configuration <i, j, Sigma>: focus word, last head assigned to the
/// focus word (-1 when none) and the set of built (head, dependent) arcs.
struct ParserState {
  int i = 1;
  int j = -1;
  std::set<std::pair<int, int>> sigma;

  bool terminal(int n) const { return i == n + 1 && j == -1; }
  bool operator==(const ParserState&) const = default;
};

struct Action {
  enum class Kind { kShift, kArc };
  Kind kind = Kind::kShift;
  int head = 0;  // Arc only

  static Action shift() { return {Kind::kShift, 0}; }
  static Action arc(int p) { return {Kind::kArc, p}; }
  bool is_shift() const { return kind == Kind::kShift; }
  bool operator==(const Action&) const = default;
};

struct LabeledAction {
  Action action;
  std::string label;  // empty for Shift

  bool operator==(const LabeledAction&) const = default;
};

/// Full SRL, or the variant where predicate positions are given and their
/// root arcs are installed before decoding.
struct Mode {
  enum class Kind { kFull, kGoldPredicates };
  Kind kind = Kind::kFull;
  std::set<int> gold;

  static Mode full() { return {}; }
  static Mode gold_predicates(std::set<int> predicates) {
    return {Kind::kGoldPredicates, std::move(predicates)};
  }
  bool gold_mode() const { return kind == Kind::kGoldPredicates; }
};

ParserState initial_state(int n, const Mode& mode = Mode::full());

bool legal(const ParserState& state, const Action& action, int n,
           const Mode& mode = Mode::full());

/// Throws ContractError when the action is not legal.
ParserState apply(const ParserState& state, const Action& action, int n,
                  const Mode& mode = Mode::full());

/// Canonical action sequence: per focus word, Arc(p) for every head in
/// ascending order, then Shift. In gold-predicate mode the pre-installed root
/// arcs are skipped, and a root arc on a non-gold word is a ContractError.
std::vector<LabeledAction> oracle(const SemGraph& graph, const Mode& mode = Mode::full());

/// Replays a sequence. In gold-predicate mode root arcs for every gold
/// predicate are installed first, labeled from root_labels. Throws
/// ContractError if the sequence is illegal or stops before the terminal state.
SemGraph run(const std::vector<LabeledAction>& sequence, int n,
             const Mode& mode = Mode::full(),
             const std::map<int, std::string>& root_labels = {});

/// One action per line: "SHIFT" or "ARC <p> <label>".
void write_actions(std::ostream& out, const std::vector<LabeledAction>& actions);
std::vector<LabeledAction> read_actions(std::istream& in);

}  // namespace ptrsrl
