#include "ptrsrl/graph.hpp"

#include <algorithm>

#include "ptrsrl/error.hpp"

namespace ptrsrl {

void SemGraph::add(int head, int dependent, std::string label) {
  if (head < 0 || head > n || dependent < 1 || dependent > n)
    throw ContractError("arc " + std::to_string(head) + "->" + std::to_string(dependent) +
                        " outside sentence of length " + std::to_string(n));
  if (head == dependent)
    throw ContractError("self-loop on " + std::to_string(head));
  auto [it, inserted] = arcs.emplace(ArcKey{dependent, head}, std::move(label));
  if (!inserted)
    throw ContractError("duplicate arc " + std::to_string(head) + "->" +
                        std::to_string(dependent));
}

const std::string* SemGraph::find(int head, int dependent) const {
  auto it = arcs.find(ArcKey{dependent, head});
  return it == arcs.end() ? nullptr : &it->second;
}

std::vector<Arc> SemGraph::arc_list() const {
  std::vector<Arc> out;
  out.reserve(arcs.size());
  for (const auto& [key, label] : arcs) out.push_back({key.head, key.dependent, label});
  return out;
}

CompositeLabel CompositeLabel::parse(const std::string& raw, bool root_arc) {
  CompositeLabel label;
  label.raw = raw;
  std::string roles = raw;
  if (root_arc) {
    std::size_t hash = raw.find('#');
    label.sense_part = raw.substr(0, hash);
    roles = hash == std::string::npos ? std::string() : raw.substr(hash + 1);
  }
  std::size_t start = 0;
  while (!roles.empty()) {
    std::size_t bar = roles.find('|', start);
    label.parts.push_back(roles.substr(start, bar == std::string::npos ? bar : bar - start));
    if (bar == std::string::npos) break;
    start = bar + 1;
  }
  return label;
}

std::string CompositeLabel::join(const std::optional<std::string>& sense,
                                 const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    if (k) out += '|';
    out += parts[k];
  }
  if (!sense) return out;
  return parts.empty() ? *sense : *sense + "#" + out;
}

SemGraph to_graph(const Sentence& sentence) {
  SemGraph graph;
  graph.n = static_cast<int>(sentence.size());
  for (const Frame& frame : sentence.frames) {
    std::vector<std::string> self_roles;
    // roles per argument position, first-seen order
    std::vector<std::pair<int, std::vector<std::string>>> grouped;
    for (const Argument& a : frame.args) {
      if (a.position == frame.predicate) {
        self_roles.push_back(a.role);
        continue;
      }
      auto it = std::find_if(grouped.begin(), grouped.end(),
                             [&](const auto& g) { return g.first == a.position; });
      if (it == grouped.end())
        grouped.push_back({a.position, {a.role}});
      else
        it->second.push_back(a.role);
    }
    graph.add(0, frame.predicate, CompositeLabel::join(frame.sense, self_roles));
    for (const auto& [position, roles] : grouped)
      graph.add(frame.predicate, position, CompositeLabel::join(std::nullopt, roles));
  }
  return graph;
}

Sentence from_graph(const SemGraph& graph, const Sentence& skeleton, RepairStats* repairs) {
  const int n = static_cast<int>(skeleton.size());
  if (graph.n != n)
    throw StructuralError("graph has " + std::to_string(graph.n) +
                          " words, skeleton has " + std::to_string(n));

  std::map<int, CompositeLabel> roots;
  std::map<int, std::vector<std::pair<int, std::vector<std::string>>>> args;
  for (const auto& [key, label] : graph.arcs) {
    if (key.head == 0) {
      CompositeLabel parsed = CompositeLabel::parse(label, true);
      if (parsed.sense_part->empty())
        throw StructuralError("root arc to " + std::to_string(key.dependent) +
                              " has no sense in label '" + label + "'");
      roots.emplace(key.dependent, std::move(parsed));
    } else {
      args[key.head].push_back({key.dependent, CompositeLabel::parse(label, false).parts});
    }
  }
  for (const auto& [head, unused] : args) {
    if (!roots.count(head)) {
      roots.emplace(head, CompositeLabel::parse(kRepairSense, true));
      if (repairs) ++repairs->missing_root_arcs;
    }
  }

  Sentence out;
  out.tokens = skeleton.tokens;
  for (Token& t : out.tokens) {
    const std::string old_pred = t.pred;
    auto it = roots.find(t.id);
    t.fillpred = it != roots.end();
    t.pred.clear();
    if (!t.fillpred) continue;
    const std::string& sense = *it->second.sense_part;
    if (!old_pred.empty() && split_pred(old_pred).second == sense) {
      t.pred = old_pred;
    } else {
      std::string lemma = old_pred.empty() ? std::string() : split_pred(old_pred).first;
      if (old_pred.empty()) lemma = t.lemma != "_" ? t.lemma : t.plemma;
      t.pred = lemma.empty() || lemma == "_" ? sense : lemma + "." + sense;
    }
  }

  for (const auto& [predicate, label] : roots) {
    Frame frame{predicate, *label.sense_part, {}};
    std::vector<std::pair<int, std::vector<std::string>>> deps;
    if (auto a = args.find(predicate); a != args.end()) deps = a->second;
    if (!label.parts.empty()) deps.push_back({predicate, label.parts});
    std::stable_sort(deps.begin(), deps.end(),
                     [](const auto& x, const auto& y) { return x.first < y.first; });
    for (const auto& [position, roles] : deps)
      for (const std::string& role : roles) frame.args.push_back({position, role});
    out.frames.push_back(std::move(frame));
  }
  return out;
}

}  // namespace ptrsrl
