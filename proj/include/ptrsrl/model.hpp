#pragma once

#include <algorithm>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "ptrsrl/autodiff.hpp"
#include "ptrsrl/conll.hpp"
#include "ptrsrl/transition.hpp"
#include "ptrsrl/vocab.hpp"

namespace ptrsrl {

struct ModelConfig {
  int word_dim = 64;
  int lemma_dim = 64;
  int char_emb_dim = 100;
  int char_filters = 100;
  int char_window = 3;
  int indicator_dim = 16;
  int context_dim = 0;  // dimension of external per-token vectors
  int encoder_layers = 3;
  int decoder_layers = 1;
  int hidden = 64;
  int mlp_dim = 0;  // 0 means hidden / 2
  double dropout = 0.33;
  int beam = 5;
  bool use_beam = true;
  bool use_coparent = true;
  bool use_lemma = true;
  bool use_char = true;
  bool use_indicator = true;
  bool use_context_vectors = false;
  bool gold_predicates = false;

  int perceptron_dim() const { return mlp_dim > 0 ? mlp_dim : std::max(1, hidden / 2); }
  /// The indicator embedding only exists in gold-predicate mode.
  bool indicator_enabled() const { return use_indicator && gold_predicates; }
  int input_dim() const;
  /// Throws ContractError on an unusable configuration.
  void validate() const;

  void write(std::ostream& out) const;
  /// Applies "key = value" lines; unknown keys are an error.
  void set(const std::string& key, const std::string& value);
  static ModelConfig read(std::istream& in);
};

/// Index-level view of one sentence.
struct SentenceInput {
  int n = 0;
  std::vector<int> words;
  std::vector<int> lemmas;
  std::vector<std::vector<int>> chars;  // with word-begin/end markers
  std::vector<std::vector<double>> context;
  std::vector<int> indicator;
  Mode mode;
};

class PointerModel;

/// LSTM memory of the decoder, one (h, c) pair per layer.
struct DecoderMemory {
  std::vector<nn::Expr> h;
  std::vector<nn::Expr> c;
};

/// Forward computation of one sentence on one graph: word representation,
/// encoder, and on-demand decoder steps, pointer scores and label scores.
class SentenceSession {
 public:
  /// rng may be null when train is false.
  SentenceSession(const PointerModel& model, nn::Graph& graph, const SentenceInput& input,
                  bool train, std::mt19937_64* rng);

  int n() const { return input_.n; }
  const SentenceInput& input() const { return input_; }
  nn::Graph& graph() { return graph_; }

  const std::vector<nn::Expr>& embeddings() const { return embeddings_; }
  /// h_0 .. h_n, h_0 being the learned root vector.
  const std::vector<nn::Expr>& encoded() const { return encoded_; }

  DecoderMemory initial_memory();
  /// r_t = h_i (+ h_j when j >= 0 and co-parent features are on).
  nn::Expr decoder_input(const ParserState& state);
  /// Advances the decoder; returns s_t and writes the new memory.
  nn::Expr decoder_step(const ParserState& state, const DecoderMemory& memory,
                        DecoderMemory& next);
  /// Unnormalized pointer scores v_t over positions 0..n.
  nn::Expr pointer_scores(nn::Expr s);
  /// Unnormalized label scores u_t for an arc from head to the focus word.
  nn::Expr label_scores(nn::Expr s, int head);

 private:
  void represent();
  void encode();

  const PointerModel& model_;
  nn::Graph& graph_;
  const SentenceInput& input_;
  bool train_;
  std::mt19937_64* rng_;
  std::vector<nn::Expr> embeddings_;
  std::vector<nn::Expr> encoded_;
  nn::Expr pointer_heads_;  // stacked f2(h_k)
  std::vector<std::optional<nn::Expr>> label_heads_;  // g2(h_k), on demand
  std::vector<std::vector<double>> decoder_masks_;
};

/// Pointer network parameters plus vocabularies.
class PointerModel {
 public:
  PointerModel(ModelConfig config, Vocabularies vocab, std::uint64_t seed);

  const ModelConfig& config() const { return config_; }
  /// Decoding settings do not affect parameter shapes and may change after loading.
  void set_decoding(bool use_beam, int beam) {
    config_.use_beam = use_beam;
    config_.beam = beam;
    config_.validate();
  }
  const Vocabularies& vocab() const { return vocab_; }
  nn::ParameterStore& params() { return params_; }
  const nn::ParameterStore& params() const { return params_; }
  nn::Parameter& param(const std::string& name) const;

  /// Maps a sentence onto vocabulary indices. Gold-predicate mode takes the
  /// FILLPRED flags of the sentence. context may be null.
  SentenceInput featurize(const Sentence& sentence,
                          const std::vector<std::vector<double>>* context = nullptr) const;

  /// Initializes word (and, when dimensions agree, lemma) embeddings from
  /// pretrained vectors. Returns the number of rows set.
  int load_pretrained(const VectorTable& table);

  /// Teacher-forced joint loss: sum of -log alpha_t[gold position] over all
  /// steps plus -log beta_t[gold label] over arc steps (and, in gold-predicate
  /// mode, over the root label of each gold predicate).
  nn::Expr loss(SentenceSession& session, const SemGraph& gold) const;

  std::string metadata() const;
  static PointerModel from_checkpoint(const std::string& path);
  void save(const std::string& path) const;

 private:
  friend class SentenceSession;
  void build_parameters(std::uint64_t seed);

  ModelConfig config_;
  Vocabularies vocab_;
  mutable nn::ParameterStore params_;
};

/// Pure functions on attention vectors.
std::vector<double> softmax_values(std::span<const double> scores);
std::vector<double> log_softmax_values(std::span<const double> scores);

/// Walks positions by decreasing score (ties: lower position first) and
/// returns Shift for p == i or the first legal Arc(p).
Action select(std::span<const double> alpha, const ParserState& state, int n, const Mode& mode);

/// argmax over labels compatible with the head (root labels for head 0,
/// argument labels otherwise); falls back to all labels if none qualify.
int best_label(std::span<const double> label_scores, const Vocabularies& vocab, int head);

}  // namespace ptrsrl
