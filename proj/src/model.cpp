#include "ptrsrl/model.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include "ptrsrl/checkpoint.hpp"
#include "ptrsrl/error.hpp"
#include "ptrsrl/graph.hpp"

namespace ptrsrl {

using nn::Expr;

// ---------------------------------------------------------------- config

int ModelConfig::input_dim() const {
  int d = word_dim;
  if (use_lemma) d += lemma_dim;
  if (use_char) d += char_filters;
  if (use_context_vectors) d += context_dim;
  if (indicator_enabled()) d += indicator_dim;
  return d;
}

void ModelConfig::validate() const {
  auto need = [](bool ok, const std::string& what) {
    if (!ok) throw ContractError("model config: " + what);
  };
  need(hidden > 0, "hidden must be positive");
  need(beam >= 1, "beam must be at least 1");
  need(word_dim > 0, "word_dim must be positive");
  need(!use_lemma || lemma_dim > 0, "lemma_dim must be positive");
  need(!use_char || (char_emb_dim > 0 && char_filters > 0 && char_window > 0),
       "character CNN dimensions must be positive");
  need(!indicator_enabled() || indicator_dim > 0, "indicator_dim must be positive");
  need(!use_context_vectors || context_dim > 0,
       "use_context_vectors needs a positive context_dim");
  need(encoder_layers >= 1 && decoder_layers >= 1, "need at least one LSTM layer");
  need(dropout >= 0.0 && dropout < 1.0, "dropout must be in [0, 1)");
}

namespace {

struct Field {
  const char* key;
  int ModelConfig::*int_field = nullptr;
  double ModelConfig::*double_field = nullptr;
  bool ModelConfig::*bool_field = nullptr;
};

const std::vector<Field>& fields() {
  static const std::vector<Field> f = {
      {"word_dim", &ModelConfig::word_dim},
      {"lemma_dim", &ModelConfig::lemma_dim},
      {"char_emb_dim", &ModelConfig::char_emb_dim},
      {"char_filters", &ModelConfig::char_filters},
      {"char_window", &ModelConfig::char_window},
      {"indicator_dim", &ModelConfig::indicator_dim},
      {"context_dim", &ModelConfig::context_dim},
      {"encoder_layers", &ModelConfig::encoder_layers},
      {"decoder_layers", &ModelConfig::decoder_layers},
      {"hidden", &ModelConfig::hidden},
      {"mlp_dim", &ModelConfig::mlp_dim},
      {"dropout", nullptr, &ModelConfig::dropout},
      {"beam", &ModelConfig::beam},
      {"use_beam", nullptr, nullptr, &ModelConfig::use_beam},
      {"use_coparent", nullptr, nullptr, &ModelConfig::use_coparent},
      {"use_lemma", nullptr, nullptr, &ModelConfig::use_lemma},
      {"use_char", nullptr, nullptr, &ModelConfig::use_char},
      {"use_indicator", nullptr, nullptr, &ModelConfig::use_indicator},
      {"use_context_vectors", nullptr, nullptr, &ModelConfig::use_context_vectors},
      {"gold_predicates", nullptr, nullptr, &ModelConfig::gold_predicates},
  };
  return f;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void ModelConfig::write(std::ostream& out) const {
  for (const Field& f : fields()) {
    out << f.key << " = ";
    if (f.int_field) {
      out << this->*f.int_field;
    } else if (f.double_field) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.17g", this->*f.double_field);
      out << buf;
    } else {
      out << (this->*f.bool_field ? "true" : "false");
    }
    out << '\n';
  }
}

void ModelConfig::set(const std::string& key, const std::string& value) {
  for (const Field& f : fields()) {
    if (key != f.key) continue;
    try {
      std::size_t used = 0;
      if (f.int_field) {
        this->*f.int_field = std::stoi(value, &used);
      } else if (f.double_field) {
        this->*f.double_field = std::stod(value, &used);
      } else {
        if (value == "true" || value == "1") this->*f.bool_field = true;
        else if (value == "false" || value == "0") this->*f.bool_field = false;
        else throw std::invalid_argument(value);
        used = value.size();
      }
      if (used != value.size()) throw std::invalid_argument(value);
    } catch (const std::logic_error&) {
      throw ContractError("model config: bad value '" + value + "' for " + key);
    }
    return;
  }
  throw ContractError("model config: unknown key '" + key + "'");
}

ModelConfig ModelConfig::read(std::istream& in) {
  ModelConfig config;
  std::string line;
  while (in.peek() != '[' && std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ContractError("model config: bad line '" + line + "'");
    config.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return config;
}

// ---------------------------------------------------------------- helpers

std::vector<double> log_softmax_values(std::span<const double> scores) {
  const double m = *std::max_element(scores.begin(), scores.end());
  double z = 0.0;
  for (double v : scores) z += std::exp(v - m);
  const double lz = m + std::log(z);
  std::vector<double> out(scores.size());
  for (std::size_t k = 0; k < scores.size(); ++k) out[k] = scores[k] - lz;
  return out;
}

std::vector<double> softmax_values(std::span<const double> scores) {
  std::vector<double> out = log_softmax_values(scores);
  for (double& v : out) v = std::exp(v);
  return out;
}

Action select(std::span<const double> alpha, const ParserState& state, int n, const Mode& mode) {
  std::vector<int> order(alpha.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return alpha[a] > alpha[b]; });
  for (int p : order) {
    if (p == state.i) return Action::shift();
    if (legal(state, Action::arc(p), n, mode)) return Action::arc(p);
  }
  // Unreachable for a non-terminal state: position i is always in alpha.
  throw ContractError("select: no legal action at focus " + std::to_string(state.i));
}

int best_label(std::span<const double> scores, const Vocabularies& vocab, int head) {
  const std::vector<bool>& allowed = head == 0 ? vocab.root_label : vocab.arg_label;
  int best = -1;
  for (std::size_t l = 0; l < scores.size(); ++l) {
    if (l < allowed.size() && !allowed[l]) continue;
    if (best < 0 || scores[l] > scores[best]) best = static_cast<int>(l);
  }
  if (best >= 0) return best;
  return static_cast<int>(std::max_element(scores.begin(), scores.end()) - scores.begin());
}

// ---------------------------------------------------------------- model

PointerModel::PointerModel(ModelConfig config, Vocabularies vocab, std::uint64_t seed)
    : config_(config), vocab_(std::move(vocab)) {
  config_.validate();
  if (vocab_.labels.size() == 0) {
    vocab_.labels.add(kRepairSense);
    vocab_.root_label = {true};
    vocab_.arg_label = {false};
  }
  build_parameters(seed);
}

nn::Parameter& PointerModel::param(const std::string& name) const { return params_.get(name); }

void PointerModel::build_parameters(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const ModelConfig& c = config_;
  const int h = c.hidden;
  const int d = c.perceptron_dim();
  const int labels = vocab_.labels.size();
  using nn::Init;
  auto add = [&](const std::string& name, nn::Dims dims, Init init) {
    params_.add(name, dims, init, rng);
  };

  add("emb.word", {vocab_.words.size(), c.word_dim}, Init::kEmbedding);
  if (c.use_lemma) add("emb.lemma", {vocab_.lemmas.size(), c.lemma_dim}, Init::kEmbedding);
  if (c.use_char) {
    add("emb.char", {vocab_.chars.size(), c.char_emb_dim}, Init::kEmbedding);
    add("char.filters", {c.char_filters, c.char_window * c.char_emb_dim}, Init::kGlorot);
    add("char.bias", {c.char_filters, 1}, Init::kZeros);
  }
  if (c.indicator_enabled()) add("emb.indicator", {2, c.indicator_dim}, Init::kEmbedding);

  for (int l = 0; l < c.encoder_layers; ++l) {
    const int in = l == 0 ? c.input_dim() : 2 * h;
    for (const char* dir : {"fwd", "bwd"}) {
      const std::string base = "enc.L" + std::to_string(l) + "." + dir;
      add(base + ".wx", {4 * h, in}, Init::kGlorot);
      add(base + ".wh", {4 * h, h}, Init::kGlorot);
      add(base + ".b", {4 * h, 1}, Init::kZeros);
    }
  }
  add("enc.root", {2 * h, 1}, Init::kEmbedding);

  for (int l = 0; l < c.decoder_layers; ++l) {
    const int in = l == 0 ? 2 * h : h;
    const std::string base = "dec.L" + std::to_string(l);
    add(base + ".wx", {4 * h, in}, Init::kGlorot);
    add(base + ".wh", {4 * h, h}, Init::kGlorot);
    add(base + ".b", {4 * h, 1}, Init::kZeros);
  }

  add("ptr.f1.w", {d, h}, Init::kGlorot);
  add("ptr.f1.b", {d, 1}, Init::kZeros);
  add("ptr.f2.w", {d, 2 * h}, Init::kGlorot);
  add("ptr.f2.b", {d, 1}, Init::kZeros);
  add("ptr.W", {d, d}, Init::kGlorot);
  add("ptr.U", {d, 1}, Init::kGlorot);
  add("ptr.V", {d, 1}, Init::kGlorot);
  add("ptr.b", {1, 1}, Init::kZeros);

  add("lab.g1.w", {d, h}, Init::kGlorot);
  add("lab.g1.b", {d, 1}, Init::kZeros);
  add("lab.g2.w", {d, 2 * h}, Init::kGlorot);
  add("lab.g2.b", {d, 1}, Init::kZeros);
  add("lab.W", {labels, d * d}, Init::kGlorot);
  add("lab.U", {labels, d}, Init::kGlorot);
  add("lab.V", {labels, d}, Init::kGlorot);
  add("lab.b", {labels, 1}, Init::kZeros);
}

SentenceInput PointerModel::featurize(const Sentence& sentence,
                                      const std::vector<std::vector<double>>* context) const {
  SentenceInput in;
  in.n = static_cast<int>(sentence.size());
  std::set<int> predicates;
  for (const Token& t : sentence.tokens) {
    in.words.push_back(vocab_.words.index(t.form));
    in.lemmas.push_back(vocab_.lemmas.index(lemma_of(t)));
    std::vector<int> chars{vocab_.chars.index(kWordBegin)};
    for (const std::string& ch : utf8_characters(t.form)) chars.push_back(vocab_.chars.index(ch));
    chars.push_back(vocab_.chars.index(kWordEnd));
    while (static_cast<int>(chars.size()) < config_.char_window)
      chars.push_back(vocab_.chars.index(kWordEnd));
    in.chars.push_back(std::move(chars));
    in.indicator.push_back(t.fillpred ? 1 : 0);
    if (t.fillpred) predicates.insert(t.id);
  }
  if (config_.use_context_vectors) {
    if (!context || static_cast<int>(context->size()) != in.n)
      throw DimensionError("featurize", "need one context vector per token (" +
                                            std::to_string(in.n) + ")");
    for (const auto& v : *context)
      if (static_cast<int>(v.size()) != config_.context_dim)
        throw DimensionError("featurize", "context vector of " + std::to_string(v.size()) +
                                              " components, model expects " +
                                              std::to_string(config_.context_dim));
    in.context = *context;
  }
  in.mode = config_.gold_predicates ? Mode::gold_predicates(predicates) : Mode::full();
  return in;
}

int PointerModel::load_pretrained(const VectorTable& table) {
  if (table.dim != config_.word_dim)
    throw DimensionError("load_pretrained", "vectors have " + std::to_string(table.dim) +
                                                " components, word_dim is " +
                                                std::to_string(config_.word_dim));
  int loaded = 0;
  auto fill = [&](const char* name, const Vocabulary& vocab) {
    nn::Parameter& p = params_.get(name);
    for (int k = 0; k < vocab.size(); ++k) {
      auto it = table.vectors.find(vocab.entry(k));
      if (it == table.vectors.end()) continue;
      std::copy(it->second.begin(), it->second.end(),
                p.value.values.begin() + static_cast<std::ptrdiff_t>(k) * table.dim);
      ++loaded;
    }
  };
  fill("emb.word", vocab_.words);
  if (config_.use_lemma && config_.lemma_dim == table.dim) fill("emb.lemma", vocab_.lemmas);
  return loaded;
}

Expr PointerModel::loss(SentenceSession& session, const SemGraph& gold) const {
  const SentenceInput& in = session.input();
  if (gold.n != in.n)
    throw ContractError("loss: gold graph has " + std::to_string(gold.n) + " words, input " +
                        std::to_string(in.n));
  const std::vector<LabeledAction> sequence = oracle(gold, in.mode);
  std::vector<Expr> terms;
  ParserState state = initial_state(in.n, in.mode);
  DecoderMemory memory = session.initial_memory();
  auto label_id = [&](const std::string& label) {
    if (!vocab_.labels.contains(label))
      throw ContractError("loss: label '" + label + "' is not in the vocabulary");
    return vocab_.labels.index(label);
  };
  for (const LabeledAction& step : sequence) {
    DecoderMemory next;
    Expr s = session.decoder_step(state, memory, next);
    if (in.mode.gold_mode() && state.j == -1 && in.mode.gold.count(state.i)) {
      const std::string* root = gold.find(0, state.i);
      if (!root) throw ContractError("loss: gold predicate without root arc");
      terms.push_back(nn::pick_neg_log_softmax(session.label_scores(s, 0), label_id(*root)));
    }
    const int target = step.action.is_shift() ? state.i : step.action.head;
    terms.push_back(nn::pick_neg_log_softmax(session.pointer_scores(s), target));
    if (!step.action.is_shift())
      terms.push_back(nn::pick_neg_log_softmax(session.label_scores(s, step.action.head),
                                               label_id(step.label)));
    if (!legal(state, step.action, in.n, in.mode))
      throw ContractError("loss: oracle and parser state desynchronized");
    state = apply(state, step.action, in.n, in.mode);
    memory = std::move(next);
  }
  if (!state.terminal(in.n)) throw ContractError("loss: oracle did not reach a terminal state");
  return nn::sum(terms);
}

std::string PointerModel::metadata() const {
  std::ostringstream out;
  out << "[config]\n";
  config_.write(out);
  vocab_.write(out);
  return out.str();
}

void PointerModel::save(const std::string& path) const {
  nn::write_checkpoint(path, nn::snapshot(params_, metadata()));
}

PointerModel PointerModel::from_checkpoint(const std::string& path) {
  nn::Checkpoint cp = nn::read_checkpoint(path);
  std::istringstream meta(cp.metadata);
  std::string header;
  std::getline(meta, header);
  if (header != "[config]") throw Error(path + ": checkpoint metadata lacks [config]");
  ModelConfig config = ModelConfig::read(meta);
  Vocabularies vocab = Vocabularies::read(meta);
  PointerModel model(config, std::move(vocab), 0);
  nn::restore(model.params_, cp);
  return model;
}

// ---------------------------------------------------------------- session

SentenceSession::SentenceSession(const PointerModel& model, nn::Graph& graph,
                                 const SentenceInput& input, bool train, std::mt19937_64* rng)
    : model_(model), graph_(graph), input_(input), train_(train && rng), rng_(rng) {
  if (input_.n < 1) throw ContractError("session: empty sentence");
  represent();
  encode();
  const ModelConfig& c = model_.config_;
  std::vector<Expr> heads;
  Expr w = graph_.parameter(model_.param("ptr.f2.w"));
  Expr b = graph_.parameter(model_.param("ptr.f2.b"));
  for (Expr h : encoded_) heads.push_back(nn::elu(nn::affine(b, {{w, h}})));
  pointer_heads_ = nn::stack_rows(heads);
  label_heads_.assign(encoded_.size(), std::nullopt);
  if (train_) {
    for (int l = 0; l < c.decoder_layers; ++l) {
      decoder_masks_.push_back(nn::dropout_mask(l == 0 ? 2 * c.hidden : c.hidden, c.dropout, *rng_));
      decoder_masks_.push_back(nn::dropout_mask(c.hidden, c.dropout, *rng_));
    }
  }
}

void SentenceSession::represent() {
  const ModelConfig& c = model_.config_;
  for (int t = 0; t < input_.n; ++t) {
    std::vector<Expr> parts;
    parts.push_back(graph_.lookup(model_.param("emb.word"), input_.words[t]));
    if (c.use_lemma) parts.push_back(graph_.lookup(model_.param("emb.lemma"), input_.lemmas[t]));
    if (c.use_char) {
      std::vector<Expr> chars;
      for (int ch : input_.chars[t]) chars.push_back(graph_.lookup(model_.param("emb.char"), ch));
      parts.push_back(nn::conv1d_maxpool(nn::stack_rows(chars),
                                         graph_.parameter(model_.param("char.filters")),
                                         graph_.parameter(model_.param("char.bias")),
                                         c.char_window));
    }
    if (c.use_context_vectors) parts.push_back(graph_.constant(input_.context[t]));
    if (c.indicator_enabled())
      parts.push_back(graph_.lookup(model_.param("emb.indicator"), input_.indicator[t]));
    Expr e = nn::concat(parts);
    if (train_) e = nn::dropout(e, c.dropout, true, *rng_);
    embeddings_.push_back(e);
  }
}

namespace {

struct LstmWeights {
  Expr wx, wh, b;
};

// gates laid out as [input, forget, output, candidate]
Expr lstm_cell(const LstmWeights& w, Expr x, Expr h, Expr c, int hidden, Expr& c_out) {
  Expr gates = nn::affine(w.b, {{w.wx, x}, {w.wh, h}});
  Expr in = nn::logistic(nn::slice(gates, 0, hidden));
  Expr forget = nn::logistic(nn::slice(gates, hidden, hidden));
  Expr out = nn::logistic(nn::slice(gates, 2 * hidden, hidden));
  Expr cand = nn::tanh(nn::slice(gates, 3 * hidden, hidden));
  c_out = nn::cmult(forget, c) + nn::cmult(in, cand);
  return nn::cmult(out, nn::tanh(c_out));
}

}  // namespace

void SentenceSession::encode() {
  const ModelConfig& c = model_.config_;
  const int h = c.hidden;
  std::vector<Expr> layer_in = embeddings_;
  for (int l = 0; l < c.encoder_layers; ++l) {
    std::vector<Expr> fwd(input_.n), bwd(input_.n);
    for (int dir = 0; dir < 2; ++dir) {
      const std::string base = "enc.L" + std::to_string(l) + (dir == 0 ? ".fwd" : ".bwd");
      LstmWeights w{graph_.parameter(model_.param(base + ".wx")),
                    graph_.parameter(model_.param(base + ".wh")),
                    graph_.parameter(model_.param(base + ".b"))};
      std::vector<double> in_mask, rec_mask;
      if (train_) {
        if (l > 0) in_mask = nn::dropout_mask(2 * h, c.dropout, *rng_);
        rec_mask = nn::dropout_mask(h, c.dropout, *rng_);
      }
      Expr hs = graph_.zeros({h, 1});
      Expr cs = graph_.zeros({h, 1});
      for (int step = 0; step < input_.n; ++step) {
        const int t = dir == 0 ? step : input_.n - 1 - step;
        Expr x = in_mask.empty() ? layer_in[t] : nn::apply_mask(layer_in[t], in_mask);
        Expr hin = rec_mask.empty() ? hs : nn::apply_mask(hs, rec_mask);
        Expr c_next;
        hs = lstm_cell(w, x, hin, cs, h, c_next);
        cs = c_next;
        (dir == 0 ? fwd : bwd)[t] = hs;
      }
    }
    for (int t = 0; t < input_.n; ++t) layer_in[t] = nn::concat({fwd[t], bwd[t]});
  }
  encoded_.clear();
  encoded_.push_back(graph_.parameter(model_.param("enc.root")));
  encoded_.insert(encoded_.end(), layer_in.begin(), layer_in.end());
}

DecoderMemory SentenceSession::initial_memory() {
  DecoderMemory m;
  for (int l = 0; l < model_.config_.decoder_layers; ++l) {
    m.h.push_back(graph_.zeros({model_.config_.hidden, 1}));
    m.c.push_back(graph_.zeros({model_.config_.hidden, 1}));
  }
  return m;
}

Expr SentenceSession::decoder_input(const ParserState& state) {
  if (state.i < 1 || state.i > input_.n)
    throw ContractError("decoder: focus " + std::to_string(state.i) + " outside sentence");
  Expr r = encoded_[state.i];
  if (model_.config_.use_coparent && state.j >= 0) r = r + encoded_[state.j];
  return r;
}

Expr SentenceSession::decoder_step(const ParserState& state, const DecoderMemory& memory,
                                   DecoderMemory& next) {
  const ModelConfig& c = model_.config_;
  Expr x = decoder_input(state);
  next.h.clear();
  next.c.clear();
  for (int l = 0; l < c.decoder_layers; ++l) {
    const std::string base = "dec.L" + std::to_string(l);
    LstmWeights w{graph_.parameter(model_.param(base + ".wx")),
                  graph_.parameter(model_.param(base + ".wh")),
                  graph_.parameter(model_.param(base + ".b"))};
    Expr xin = x;
    Expr hin = memory.h[l];
    if (train_) {
      xin = nn::apply_mask(x, decoder_masks_[2 * l]);
      hin = nn::apply_mask(hin, decoder_masks_[2 * l + 1]);
    }
    Expr c_next;
    x = lstm_cell(w, xin, hin, memory.c[l], c.hidden, c_next);
    next.h.push_back(x);
    next.c.push_back(c_next);
  }
  return x;
}

Expr SentenceSession::pointer_scores(Expr s) {
  Expr f1 = nn::elu(nn::affine(graph_.parameter(model_.param("ptr.f1.b")),
                               {{graph_.parameter(model_.param("ptr.f1.w")), s}}));
  Expr query = nn::matvec_t(graph_.parameter(model_.param("ptr.W")), f1) +
               graph_.parameter(model_.param("ptr.V"));
  Expr offset = nn::dot(graph_.parameter(model_.param("ptr.U")), f1) +
                graph_.parameter(model_.param("ptr.b"));
  return nn::add_scalar(nn::matvec(pointer_heads_, query), offset);
}

Expr SentenceSession::label_scores(Expr s, int head) {
  if (head < 0 || head > input_.n) throw ContractError("labeler: head outside sentence");
  if (!label_heads_[head]) {
    label_heads_[head] = nn::elu(nn::affine(graph_.parameter(model_.param("lab.g2.b")),
                                            {{graph_.parameter(model_.param("lab.g2.w")),
                                              encoded_[head]}}));
  }
  Expr g2 = *label_heads_[head];
  Expr g1 = nn::elu(nn::affine(graph_.parameter(model_.param("lab.g1.b")),
                               {{graph_.parameter(model_.param("lab.g1.w")), s}}));
  return nn::affine(graph_.parameter(model_.param("lab.b")),
                    {{graph_.parameter(model_.param("lab.W")), nn::outer(g1, g2)},
                     {graph_.parameter(model_.param("lab.U")), g1},
                     {graph_.parameter(model_.param("lab.V")), g2}});
}

}  // namespace ptrsrl
