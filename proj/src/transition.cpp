#include "ptrsrl/transition.hpp"

#include <istream>
#include <ostream>
#include <sstream>

#include "ptrsrl/error.hpp"

namespace ptrsrl {

ParserState initial_state(int /*n*/, const Mode& mode) {
  ParserState state;
  if (mode.gold_mode())
    for (int p : mode.gold) state.sigma.insert({0, p});
  return state;
}

bool legal(const ParserState& state, const Action& action, int n, const Mode& mode) {
  if (state.i > n) return false;
  if (action.is_shift()) return true;
  const int p = action.head;
  if (p < 0 || p > n || p == state.i) return false;
  if (p <= state.j) return false;
  if (state.sigma.count({p, state.i})) return false;
  // Root arcs of gold predicates are pre-installed, so the root is never a
  // legal head in this mode.
  if (mode.gold_mode() && !mode.gold.count(p)) return false;
  return true;
}

ParserState apply(const ParserState& state, const Action& action, int n, const Mode& mode) {
  if (!legal(state, action, n, mode)) {
    throw ContractError(std::string("illegal ") +
                        (action.is_shift() ? "SHIFT" : "ARC " + std::to_string(action.head)) +
                        " at <" + std::to_string(state.i) + ", " + std::to_string(state.j) + ">");
  }
  ParserState next = state;
  if (action.is_shift()) {
    ++next.i;
    next.j = -1;
  } else {
    next.j = action.head;
    next.sigma.insert({action.head, state.i});
  }
  return next;
}

std::vector<LabeledAction> oracle(const SemGraph& graph, const Mode& mode) {
  std::vector<LabeledAction> out;
  out.reserve(graph.n + graph.arcs.size());
  auto it = graph.arcs.begin();
  for (int i = 1; i <= graph.n; ++i) {
    for (; it != graph.arcs.end() && it->first.dependent == i; ++it) {
      const int head = it->first.head;
      if (mode.gold_mode() && head == 0) {
        if (!mode.gold.count(i))
          throw ContractError("root arc on non-gold predicate " + std::to_string(i));
        continue;
      }
      out.push_back({Action::arc(head), it->second});
    }
    out.push_back({Action::shift(), {}});
  }
  return out;
}

SemGraph run(const std::vector<LabeledAction>& sequence, int n, const Mode& mode,
             const std::map<int, std::string>& root_labels) {
  SemGraph graph;
  graph.n = n;
  ParserState state = initial_state(n, mode);
  if (mode.gold_mode()) {
    for (int p : mode.gold) {
      auto label = root_labels.find(p);
      graph.add(0, p, label == root_labels.end() ? std::string() : label->second);
    }
  }
  for (const LabeledAction& step : sequence) {
    state = apply(state, step.action, n, mode);
    if (!step.action.is_shift()) graph.add(step.action.head, state.i, step.label);
  }
  if (!state.terminal(n))
    throw ContractError("incomplete derivation: stopped at word " + std::to_string(state.i) +
                        " of " + std::to_string(n));
  return graph;
}

void write_actions(std::ostream& out, const std::vector<LabeledAction>& actions) {
  for (const LabeledAction& a : actions) {
    if (a.action.is_shift())
      out << "SHIFT\n";
    else
      out << "ARC " << a.action.head << ' ' << a.label << '\n';
  }
}

std::vector<LabeledAction> read_actions(std::istream& in) {
  std::vector<LabeledAction> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string kind;
    fields >> kind;
    if (kind == "SHIFT") {
      out.push_back({Action::shift(), {}});
    } else if (kind == "ARC") {
      int p = -1;
      std::string label;
      if (!(fields >> p >> label)) throw ParseError(lineno, "expected 'ARC <p> <label>'");
      out.push_back({Action::arc(p), label});
    } else {
      throw ParseError(lineno, "unknown action '" + kind + "'");
    }
  }
  return out;
}

}  // namespace ptrsrl
