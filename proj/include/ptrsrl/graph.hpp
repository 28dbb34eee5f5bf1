#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ptrsrl/conll.hpp"

namespace ptrsrl {

/// Map key ordered by dependent first, then head: iteration order equals the
/// left-to-right order in which the transition system builds arcs.
struct ArcKey {
  int dependent = 0;
  int head = 0;

  auto operator<=>(const ArcKey&) const = default;
};

struct Arc {
  int head = 0;
  int dependent = 0;
  std::string label;

  bool operator==(const Arc&) const = default;
};

/// Single-rooted labeled dependency graph; node 0 is the artificial root.
struct SemGraph {
  int n = 0;
  std::map<ArcKey, std::string> arcs;

  /// Inserts an arc; throws ContractError on a duplicate, a self-loop or an
  /// out-of-range endpoint.
  void add(int head, int dependent, std::string label);
  const std::string* find(int head, int dependent) const;
  std::vector<Arc> arc_list() const;
  std::size_t size() const { return arcs.size(); }

  bool operator==(const SemGraph&) const = default;
};

/// Parsed view of an arc label: "sense#role1|role2" on root arcs,
/// "role1|role2" elsewhere.
struct CompositeLabel {
  std::string raw;
  std::optional<std::string> sense_part;
  std::vector<std::string> parts;

  static CompositeLabel parse(const std::string& raw, bool root_arc);
  static std::string join(const std::optional<std::string>& sense,
                          const std::vector<std::string>& parts);
};

/// Sense used when a predicted argument points at a word with no root arc.
inline constexpr const char* kRepairSense = "01";

struct RepairStats {
  int missing_root_arcs = 0;
};

SemGraph to_graph(const Sentence& sentence);

/// Inverse of to_graph. Columns other than FILLPRED/PRED/APRED come from the
/// skeleton. Throws StructuralError for a root arc without a sense.
Sentence from_graph(const SemGraph& graph, const Sentence& skeleton,
                    RepairStats* repairs = nullptr);

}  // namespace ptrsrl
