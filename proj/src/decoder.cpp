#include "ptrsrl/decoder.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "ptrsrl/error.hpp"

namespace ptrsrl {

namespace {

struct Hypothesis {
  ParserState state;
  DecoderMemory memory;
  double log_prob = 0.0;
  std::vector<LabeledAction> actions;
  std::map<int, std::string> root_labels;
};

struct Candidate {
  int item;
  int position;
  double score;
};

std::string root_label(SentenceSession& session, const PointerModel& model, nn::Expr s) {
  nn::Expr scores = session.label_scores(s, 0);
  return model.vocab().labels.entry(best_label(scores.values(), model.vocab(), 0));
}

std::string arc_label(SentenceSession& session, const PointerModel& model, nn::Expr s, int head) {
  nn::Expr scores = session.label_scores(s, head);
  return model.vocab().labels.entry(best_label(scores.values(), model.vocab(), head));
}

bool needs_root_label(const SentenceInput& input, const ParserState& state) {
  return input.mode.gold_mode() && state.j == -1 && input.mode.gold.count(state.i);
}

DecodeResult finish(const SentenceInput& input, Hypothesis h) {
  DecodeResult r;
  r.graph = run(h.actions, input.n, input.mode, h.root_labels);
  r.actions = std::move(h.actions);
  r.root_labels = std::move(h.root_labels);
  r.log_prob = h.log_prob;
  return r;
}

}  // namespace

DecodeResult decode_greedy(const PointerModel& model, const SentenceInput& input) {
  nn::Graph graph;
  SentenceSession session(model, graph, input, false, nullptr);
  Hypothesis h;
  h.state = initial_state(input.n, input.mode);
  h.memory = session.initial_memory();
  const int max_steps = input.n * (input.n + 2);
  while (!h.state.terminal(input.n)) {
    if (static_cast<int>(h.actions.size()) >= max_steps)
      throw ContractError("greedy decoding exceeded the step bound");
    DecoderMemory next;
    nn::Expr s = session.decoder_step(h.state, h.memory, next);
    if (needs_root_label(input, h.state))
      h.root_labels[h.state.i] = root_label(session, model, s);
    const std::vector<double> log_alpha =
        log_softmax_values(session.pointer_scores(s).values());
    const Action action = select(log_alpha, h.state, input.n, input.mode);
    const int position = action.is_shift() ? h.state.i : action.head;
    h.log_prob += log_alpha[position];
    std::string label;
    if (!action.is_shift()) label = arc_label(session, model, s, action.head);
    h.state = apply(h.state, action, input.n, input.mode);
    h.actions.push_back({action, std::move(label)});
    h.memory = std::move(next);
  }
  return finish(input, std::move(h));
}

DecodeResult decode_beam(const PointerModel& model, const SentenceInput& input, int beam) {
  if (beam < 1) throw ContractError("beam size must be at least 1");
  std::vector<DecodeResult> finished;
  if (beam > 1) finished.push_back(decode_greedy(model, input));
  double best_finished =
      finished.empty() ? -std::numeric_limits<double>::infinity() : finished[0].log_prob;

  nn::Graph graph;
  SentenceSession session(model, graph, input, false, nullptr);
  std::vector<Hypothesis> active(1);
  active[0].state = initial_state(input.n, input.mode);
  active[0].memory = session.initial_memory();

  const int max_steps = input.n * (input.n + 2);
  for (int step = 0; !active.empty(); ++step) {
    if (step >= max_steps) throw ContractError("beam decoding exceeded the step bound");
    std::vector<DecoderMemory> memories(active.size());
    std::vector<nn::Expr> states(active.size());
    std::vector<Candidate> candidates;
    for (std::size_t a = 0; a < active.size(); ++a) {
      Hypothesis& h = active[a];
      states[a] = session.decoder_step(h.state, h.memory, memories[a]);
      if (needs_root_label(input, h.state))
        h.root_labels[h.state.i] = root_label(session, model, states[a]);
      const std::vector<double> log_alpha =
          log_softmax_values(session.pointer_scores(states[a]).values());
      for (int p = 0; p <= input.n; ++p) {
        if (p != h.state.i && !legal(h.state, Action::arc(p), input.n, input.mode)) continue;
        candidates.push_back({static_cast<int>(a), p, h.log_prob + log_alpha[p]});
      }
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& x, const Candidate& y) { return x.score > y.score; });
    if (static_cast<int>(candidates.size()) > beam) candidates.resize(beam);

    std::vector<Hypothesis> next;
    for (const Candidate& c : candidates) {
      const Hypothesis& parent = active[c.item];
      Hypothesis child;
      const bool shift = c.position == parent.state.i;
      const Action action = shift ? Action::shift() : Action::arc(c.position);
      child.state = apply(parent.state, action, input.n, input.mode);
      child.memory = memories[c.item];
      child.log_prob = c.score;
      child.actions = parent.actions;
      child.root_labels = parent.root_labels;
      child.actions.push_back(
          {action, shift ? std::string() : arc_label(session, model, states[c.item], c.position)});
      if (child.state.terminal(input.n)) {
        if (child.log_prob > best_finished) best_finished = child.log_prob;
        finished.push_back(finish(input, std::move(child)));
      } else {
        next.push_back(std::move(child));
      }
    }
    // log-probabilities only decrease, so items at or below the best
    // finished score can never overtake it
    std::erase_if(next, [&](const Hypothesis& h) { return h.log_prob <= best_finished; });
    active = std::move(next);
  }

  std::size_t best = 0;
  for (std::size_t k = 1; k < finished.size(); ++k)
    if (finished[k].log_prob > finished[best].log_prob) best = k;
  return std::move(finished[best]);
}

DecodeResult decode(const PointerModel& model, const SentenceInput& input) {
  const ModelConfig& c = model.config();
  return c.use_beam ? decode_beam(model, input, c.beam) : decode_greedy(model, input);
}

std::vector<DecodeResult> decode_all(const PointerModel& model,
                                     const std::vector<SentenceInput>& inputs, int threads) {
  std::vector<DecodeResult> out(inputs.size());
  const int count = static_cast<int>(inputs.size());
  if (threads <= 1) {
    for (int k = 0; k < count; ++k)
      out[k] = inputs[k].n > 0 ? decode(model, inputs[k]) : DecodeResult{};
    return out;
  }
  std::exception_ptr error;
#pragma omp parallel for num_threads(threads) schedule(dynamic)
  for (int k = 0; k < count; ++k) {
    try {
      out[k] = inputs[k].n > 0 ? decode(model, inputs[k]) : DecodeResult{};
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace ptrsrl
