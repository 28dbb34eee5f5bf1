#pragma once

#include <map>
#include <string>
#include <vector>

#include "ptrsrl/graph.hpp"
#include "ptrsrl/model.hpp"
#include "ptrsrl/transition.hpp"

namespace ptrsrl {

struct DecodeResult {
  SemGraph graph;
  std::vector<LabeledAction> actions;
  std::map<int, std::string> root_labels;  // gold-predicate mode only
  /// Sum of log alpha_t over the chosen positions. Labels are picked greedily
  /// per arc and do not enter the search score.
  double log_prob = 0.0;
};

/// Stepwise greedy decoding with the pointer selection rule.
DecodeResult decode_greedy(const PointerModel& model, const SentenceInput& input);

/// Beam search over transition sequences. Items advance one action per step;
/// finished items leave the beam; an active item is dropped once it cannot
/// beat the best finished one. For beam > 1 the greedy path is also a
/// finished candidate, so the result never scores below greedy decoding.
/// beam == 1 reproduces decode_greedy exactly.
DecodeResult decode_beam(const PointerModel& model, const SentenceInput& input, int beam);

/// Greedy or beam search according to the model configuration.
DecodeResult decode(const PointerModel& model, const SentenceInput& input);

/// Decodes many sentences, in parallel across sentences when threads > 1.
std::vector<DecodeResult> decode_all(const PointerModel& model,
                                     const std::vector<SentenceInput>& inputs, int threads);

}  // namespace ptrsrl
