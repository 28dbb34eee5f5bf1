#include "ptrsrl/commands.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include "ptrsrl/analyzer.hpp"
#include "ptrsrl/conll.hpp"
#include "ptrsrl/decoder.hpp"
#include "ptrsrl/error.hpp"
#include "ptrsrl/graph.hpp"
#include "ptrsrl/model.hpp"
#include "ptrsrl/scorer.hpp"
#include "ptrsrl/trainer.hpp"
#include "ptrsrl/transition.hpp"

namespace ptrsrl {

namespace {

/// Usage problems detected after CLI parsing.
class UsageError : public Error {
 public:
  using Error::Error;
};

struct RunConfig {
  std::string train_path;
  std::string dev_path;
  std::string input_path;
  std::string gold_path;
  std::string pred_path;
  std::string vectors_path;
  std::string train_context_path;
  std::string dev_context_path;
  std::string context_path;
  std::string checkpoint_path;
  std::string output_path;
  std::string log_path;
  std::string mode = "full";
  std::string source = "gold";
  std::uint64_t seed = 1;
  int epochs = 600;
  int batch = 32;
  int patience = 0;
  int threads = 1;
  nn::OptimizerConfig optimizer;
  int bound = 0;
  bool actions = false;
  std::vector<int> length_bounds;
};

bool gold_mode(const std::string& mode) {
  if (mode == "full") return false;
  if (mode == "gold-predicates") return true;
  throw UsageError("unknown mode '" + mode + "' (expected full or gold-predicates)");
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

void add_model_options(CLI::App* app, ModelConfig& m) {
  app->add_option("--word_dim,--word-dim", m.word_dim);
  app->add_option("--lemma_dim,--lemma-dim", m.lemma_dim);
  app->add_option("--char_emb_dim,--char-emb-dim", m.char_emb_dim);
  app->add_option("--char_filters,--char-filters", m.char_filters);
  app->add_option("--char_window,--char-window", m.char_window);
  app->add_option("--indicator_dim,--indicator-dim", m.indicator_dim);
  app->add_option("--context_dim,--context-dim", m.context_dim);
  app->add_option("--encoder_layers,--encoder-layers", m.encoder_layers);
  app->add_option("--decoder_layers,--decoder-layers", m.decoder_layers);
  app->add_option("--hidden", m.hidden);
  app->add_option("--mlp_dim,--mlp-dim", m.mlp_dim);
  app->add_option("--dropout", m.dropout);
  app->add_option("--beam", m.beam);
  app->add_flag("--use_beam,--use-beam,!--no-beam", m.use_beam);
  app->add_flag("--use_coparent,--use-coparent,!--no-coparent", m.use_coparent);
  app->add_flag("--use_lemma,--use-lemma,!--no-lemma", m.use_lemma);
  app->add_flag("--use_char,--use-char,!--no-char", m.use_char);
  app->add_flag("--use_indicator,--use-indicator,!--no-indicator", m.use_indicator);
  app->add_flag("--use_context_vectors,--use-context-vectors", m.use_context_vectors);
}

std::vector<Sentence> read_corpus(const std::string& path, std::ostream& err) {
  std::vector<Warning> warnings;
  std::vector<Sentence> corpus = read_conll_file(path, &warnings);
  for (const Warning& w : warnings)
    err << path << ": warning: line " << w.line << ": " << w.message << '\n';
  return corpus;
}

std::unique_ptr<ContextVectors> maybe_context(const ModelConfig& config,
                                              const std::string& path,
                                              const std::string& flag) {
  if (!config.use_context_vectors) return nullptr;
  if (path.empty()) throw UsageError("use_context_vectors requires " + flag);
  return std::make_unique<ContextVectors>(load_context_vectors(path));
}

/// Writes to the file at path, or to fallback when path is empty.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : out_(&fallback) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw Error("cannot open " + path + " for writing");
      out_ = &file_;
    }
  }
  std::ostream& stream() { return *out_; }

 private:
  std::ofstream file_;
  std::ostream* out_;
};

int cmd_train(const RunConfig& run, ModelConfig config, std::ostream& out, std::ostream& err) {
  config.gold_predicates = gold_mode(run.mode);
  config.validate();
  const std::vector<Sentence> train_set = read_corpus(run.train_path, err);
  const std::vector<Sentence> dev_set =
      run.dev_path.empty() ? train_set : read_corpus(run.dev_path, err);
  auto train_context = maybe_context(config, run.train_context_path, "--train-context");
  std::unique_ptr<ContextVectors> dev_context;
  if (config.use_context_vectors)
    dev_context = run.dev_path.empty()
                      ? std::make_unique<ContextVectors>(*train_context)
                      : maybe_context(config, run.dev_context_path, "--dev-context");

  PointerModel model(config, Vocabularies::build(train_set), run.seed);
  if (!run.vectors_path.empty()) {
    const int rows = model.load_pretrained(VectorTable::load(run.vectors_path));
    err << "pretrained rows " << rows << '\n';
  }

  TrainOptions options;
  options.epochs = run.epochs;
  options.batch = run.batch;
  options.patience = run.patience;
  options.threads = run.threads;
  options.seed = run.seed;
  options.optimizer = run.optimizer;
  options.checkpoint = run.checkpoint_path;

  Sink log(run.log_path, out);
  const TrainResult result =
      train(model, train_set, train_context.get(), dev_set, dev_context.get(), options,
            [&](const EpochLog& e) {
              log.stream() << "epoch " << e.epoch << " loss " << fixed(e.loss, 6) << " dev_p "
                           << fixed(e.dev.precision(), 2) << " dev_r "
                           << fixed(e.dev.recall(), 2) << " dev_f1 " << fixed(e.dev.f1(), 2)
                           << " lr " << fixed(e.lr, 8) << (e.improved ? " best" : "") << '\n';
              log.stream().flush();
            });
  log.stream() << "best_epoch " << result.best_epoch << " dev_f1 " << fixed(result.best_f1, 2)
               << '\n';
  return kExitOk;
}

int cmd_predict(const RunConfig& run, const ModelConfig& overrides, const CLI::App& app,
                std::ostream& out, std::ostream& err) {
  PointerModel model = PointerModel::from_checkpoint(run.checkpoint_path);
  if (app.count("--mode") && gold_mode(run.mode) != model.config().gold_predicates)
    throw UsageError("--mode " + run.mode + " does not match the checkpoint");
  bool use_beam = model.config().use_beam;
  int beam = model.config().beam;
  if (app.count("--use_beam")) use_beam = overrides.use_beam;
  if (app.count("--beam")) beam = overrides.beam;
  model.set_decoding(use_beam, beam);

  const std::vector<Sentence> input = read_corpus(run.input_path, err);
  auto context = maybe_context(model.config(), run.context_path, "--context");
  int repairs = 0;
  const std::vector<Sentence> predicted =
      predict(model, input, context.get(), run.threads, &repairs);
  Sink sink(run.output_path, out);
  write_conll(sink.stream(), predicted);
  if (repairs > 0) err << "repaired root arcs " << repairs << '\n';
  return kExitOk;
}

int cmd_eval(const RunConfig& run, std::ostream& out, std::ostream& err) {
  const std::vector<Sentence> gold = read_corpus(run.gold_path, err);
  const std::vector<Sentence> pred = read_corpus(run.pred_path, err);
  const ScoreReport report = score(gold, pred);
  report.write_table(out);
  out << '\n';
  report.write_keyvalue(out);
  if (!run.length_bounds.empty()) {
    out << '\n';
    write_breakdown(out, score_breakdown_by_length(gold, pred, run.length_bounds));
  }
  return kExitOk;
}

int cmd_oracle_check(const RunConfig& run, std::ostream& out, std::ostream& err) {
  const bool gold = gold_mode(run.mode);
  const std::vector<Sentence> corpus = read_corpus(run.input_path, err);
  long words = 0;
  long arcs = 0;
  long transitions = 0;
  int failures = 0;
  int length_law = 0;
  for (std::size_t k = 0; k < corpus.size(); ++k) {
    const Sentence& s = corpus[k];
    const std::string where = "sentence " + std::to_string(k + 1) + ": ";
    try {
      const SemGraph graph = to_graph(s);
      Mode mode = Mode::full();
      std::map<int, std::string> root_labels;
      if (gold) {
        std::set<int> predicates;
        for (const Token& t : s.tokens)
          if (t.fillpred) predicates.insert(t.id);
        mode = Mode::gold_predicates(predicates);
        for (const Arc& a : graph.arc_list())
          if (a.head == 0) root_labels[a.dependent] = a.label;
      }
      const std::vector<LabeledAction> seq = oracle(graph, mode);
      if (run.actions) {
        out << "# sentence " << k + 1 << '\n';
        write_actions(out, seq);
      }
      const int n = static_cast<int>(s.size());
      words += n;
      arcs += static_cast<long>(graph.size());
      transitions += static_cast<long>(seq.size());
      const long expected_length =
          n + static_cast<long>(graph.size()) -
          (gold ? static_cast<long>(root_labels.size()) : 0);
      if (static_cast<long>(seq.size()) != expected_length) {
        ++length_law;
        out << where << "length " << seq.size() << " != " << expected_length << '\n';
      }
      const SemGraph replay = ptrsrl::run(seq, n, mode, root_labels);
      if (replay != graph) {
        ++failures;
        out << where << "replayed graph differs\n";
        continue;
      }
      if (from_graph(replay, s) != s) {
        ++failures;
        out << where << "frames differ after conversion\n";
      }
    } catch (const Error& e) {
      ++failures;
      out << where << e.what() << '\n';
    }
  }
  out << "sentences " << corpus.size() << '\n'
      << "failures " << failures << '\n'
      << "length_law_violations " << length_law << '\n'
      << "words " << words << '\n'
      << "arcs " << arcs << '\n'
      << "transitions " << transitions << '\n';
  return failures == 0 && length_law == 0 ? kExitOk : kExitRuntime;
}

int cmd_analyze(const RunConfig& run, std::ostream& out, std::ostream& err) {
  const std::vector<Sentence> corpus = read_corpus(run.input_path, err);
  std::vector<ComplexityRecord> records;
  if (run.source == "gold") {
    for (const Sentence& s : corpus) records.push_back(measure(to_graph(s)));
  } else if (run.source == "decode") {
    if (run.checkpoint_path.empty()) throw UsageError("--source decode requires --checkpoint");
    PointerModel model = PointerModel::from_checkpoint(run.checkpoint_path);
    auto context = maybe_context(model.config(), run.context_path, "--context");
    const std::vector<Sentence> stripped = strip_for(model.config(), corpus);
    std::vector<SentenceInput> inputs;
    for (std::size_t k = 0; k < stripped.size(); ++k)
      inputs.push_back(model.featurize(stripped[k], context ? &(*context)[k] : nullptr));
    for (const DecodeResult& r : decode_all(model, inputs, run.threads))
      records.push_back({r.graph.n, static_cast<int>(r.actions.size()),
                         static_cast<int>(r.graph.size())});
  } else {
    throw UsageError("unknown source '" + run.source + "' (expected gold or decode)");
  }
  if (records.empty()) throw UsageError(run.input_path + ": no sentences");
  const Analysis analysis = analyze(records);
  Sink sink(run.output_path, out);
  write_csv(sink.stream(), analysis);
  if (run.bound > 0) {
    const bool ok = bound_check(analysis.records, run.bound);
    err << "bound t <= " << run.bound << "n: " << (ok ? "holds" : "violated") << '\n';
    return ok ? kExitOk : kExitRuntime;
  }
  return kExitOk;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

/// Moves "--config FILE" entries out of args and splices the file's settings
/// in right after the subcommand name, ahead of the explicit flags.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> head;
  std::vector<std::string> rest;
  std::vector<std::string> from_files;
  for (std::size_t k = 0; k < args.size(); ++k) {
    const std::string& a = args[k];
    std::string path;
    if (a == "--config") {
      if (k + 1 >= args.size()) throw UsageError("--config needs a file");
      path = args[++k];
    } else if (a.rfind("--config=", 0) == 0) {
      path = a.substr(9);
    } else {
      (k < 2 ? head : rest).push_back(a);
      continue;
    }
    for (std::string& c : config_arguments(path)) from_files.push_back(std::move(c));
  }
  head.insert(head.end(), from_files.begin(), from_files.end());
  head.insert(head.end(), rest.begin(), rest.end());
  return head;
}

}  // namespace

std::vector<std::string> config_arguments(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path);
  std::vector<std::string> out;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';' || t[0] == '[') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw UsageError(path + ":" + std::to_string(number) + ": expected key = value");
    std::string value = trim(t.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);
    out.push_back("--" + trim(t.substr(0, eq)) + "=" + value);
  }
  return out;
}

int run_cli(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  RunConfig run;
  ModelConfig model;
  CLI::App app{"Transition-based semantic role labeling with a pointer network"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  std::string config_path;  // consumed by expand_config; listed for --help
  auto config_option = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "key = value settings; explicit flags win");
  };

  CLI::App* train_cmd = app.add_subcommand("train", "train a model");
  config_option(train_cmd);
  train_cmd->add_option("--train", run.train_path, "training CoNLL-2009 file")
      ->required()
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--dev", run.dev_path, "development file (defaults to --train)")
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--checkpoint", run.checkpoint_path, "best-dev checkpoint output")
      ->required();
  train_cmd->add_option("--vectors", run.vectors_path, "pretrained word vectors")
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--train_context,--train-context", run.train_context_path)
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--dev_context,--dev-context", run.dev_context_path)
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--log", run.log_path, "training log file (default stdout)");
  train_cmd->add_option("--mode", run.mode, "full or gold-predicates");
  train_cmd->add_option("--seed", run.seed);
  train_cmd->add_option("--epochs", run.epochs);
  train_cmd->add_option("--batch", run.batch);
  train_cmd->add_option("--patience", run.patience, "early exit after N stale epochs");
  train_cmd->add_option("--threads", run.threads);
  train_cmd->add_option("--lr", run.optimizer.lr0, "initial learning rate");
  train_cmd->add_option("--clip", run.optimizer.clip, "gradient norm limit");
  train_cmd->add_option("--decay_patience,--decay-patience", run.optimizer.decay_patience,
                        "stale epochs before the learning rate is multiplied by 0.75");
  add_model_options(train_cmd, model);

  CLI::App* predict_cmd = app.add_subcommand("predict", "label a CoNLL-2009 file");
  config_option(predict_cmd);
  predict_cmd->add_option("--checkpoint", run.checkpoint_path)
      ->required()
      ->check(CLI::ExistingFile);
  predict_cmd->add_option("--input", run.input_path)->required()->check(CLI::ExistingFile);
  predict_cmd->add_option("--output", run.output_path, "output file (default stdout)");
  predict_cmd->add_option("--context", run.context_path)->check(CLI::ExistingFile);
  predict_cmd->add_option("--mode", run.mode, "must match the checkpoint");
  predict_cmd->add_option("--threads", run.threads);
  predict_cmd->add_option("--seed", run.seed, "accepted for config compatibility");
  predict_cmd->add_option("--beam", model.beam);
  predict_cmd->add_flag("--use_beam,--use-beam,!--no-beam", model.use_beam);

  CLI::App* eval_cmd = app.add_subcommand("eval", "score predictions against gold");
  config_option(eval_cmd);
  eval_cmd->add_option("--gold", run.gold_path)->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--pred", run.pred_path)->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--by_length,--by-length", run.length_bounds,
                       "inclusive length bucket bounds")
      ->delimiter(',');

  CLI::App* oracle_cmd = app.add_subcommand("oracle-check", "verify oracle round trips");
  config_option(oracle_cmd);
  oracle_cmd->add_option("--data,--input", run.input_path)
      ->required()
      ->check(CLI::ExistingFile);
  oracle_cmd->add_option("--mode", run.mode, "full or gold-predicates");
  oracle_cmd->add_flag("--actions", run.actions, "print every oracle sequence");

  CLI::App* analyze_cmd = app.add_subcommand("analyze", "transition counts against length");
  config_option(analyze_cmd);
  analyze_cmd->add_option("--data,--input", run.input_path)
      ->required()
      ->check(CLI::ExistingFile);
  analyze_cmd->add_option("--source", run.source, "gold or decode");
  analyze_cmd->add_option("--checkpoint", run.checkpoint_path)->check(CLI::ExistingFile);
  analyze_cmd->add_option("--context", run.context_path)->check(CLI::ExistingFile);
  analyze_cmd->add_option("--output", run.output_path, "CSV file (default stdout)");
  analyze_cmd->add_option("--threads", run.threads);
  analyze_cmd->add_option("--bound", run.bound, "exit 1 unless t <= k*n everywhere");

  try {
    std::vector<std::string> args = expand_config(raw_args);
    std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*train_cmd) return cmd_train(run, model, out, err);
    if (*predict_cmd) return cmd_predict(run, model, *predict_cmd, out, err);
    if (*eval_cmd) return cmd_eval(run, out, err);
    if (*oracle_cmd) return cmd_oracle_check(run, out, err);
    if (*analyze_cmd) return cmd_analyze(run, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "format error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const EvalError& e) {
    err << "format error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace ptrsrl
