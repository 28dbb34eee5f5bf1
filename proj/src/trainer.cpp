#include "ptrsrl/trainer.hpp"

#include <omp.h>

#include <algorithm>
#include <exception>
#include <numeric>
#include <random>

#include "ptrsrl/decoder.hpp"
#include "ptrsrl/error.hpp"
#include "ptrsrl/graph.hpp"

namespace ptrsrl {

std::vector<Sentence> strip_for(const ModelConfig& config, const std::vector<Sentence>& gold) {
  std::vector<Sentence> out;
  out.reserve(gold.size());
  const StripMode mode =
      config.gold_predicates ? StripMode::kKeepPredicates : StripMode::kPlainText;
  for (const Sentence& s : gold) out.push_back(strip_gold(s, mode));
  return out;
}

namespace {

const std::vector<std::vector<double>>* context_for(const ContextVectors* context,
                                                    std::size_t k) {
  if (!context) return nullptr;
  if (k >= context->size())
    throw DimensionError("context vectors", "no vectors for sentence " + std::to_string(k));
  return &(*context)[k];
}

}  // namespace

std::vector<Sentence> predict(const PointerModel& model, const std::vector<Sentence>& sentences,
                              const ContextVectors* context, int threads, int* repairs) {
  const std::vector<Sentence> inputs = strip_for(model.config(), sentences);
  std::vector<SentenceInput> features;
  features.reserve(inputs.size());
  for (std::size_t k = 0; k < inputs.size(); ++k)
    features.push_back(model.featurize(inputs[k], context_for(context, k)));
  const std::vector<DecodeResult> decoded = decode_all(model, features, threads);
  std::vector<Sentence> out;
  out.reserve(inputs.size());
  RepairStats stats;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    SemGraph graph = decoded[k].graph;
    graph.n = static_cast<int>(inputs[k].size());
    out.push_back(from_graph(graph, inputs[k], &stats));
  }
  if (repairs) *repairs += stats.missing_root_arcs;
  return out;
}

TrainResult train(PointerModel& model, const std::vector<Sentence>& train_set,
                  const ContextVectors* train_context, const std::vector<Sentence>& dev_set,
                  const ContextVectors* dev_context, const TrainOptions& options,
                  const std::function<void(const EpochLog&)>& on_epoch) {
  if (options.batch < 1) throw ContractError("train: batch must be at least 1");
  if (options.epochs < 0) throw ContractError("train: epochs must be non-negative");
  const int threads = std::max(1, options.threads);

  std::vector<SentenceInput> inputs;
  std::vector<SemGraph> golds;
  for (std::size_t k = 0; k < train_set.size(); ++k) {
    if (train_set[k].size() == 0) continue;
    inputs.push_back(model.featurize(train_set[k], context_for(train_context, k)));
    golds.push_back(to_graph(train_set[k]));
  }

  TrainResult result;
  nn::Adam adam(options.optimizer);
  nn::LearningRateSchedule schedule(options.optimizer);
  nn::ParameterStore& params = model.params();
  std::vector<nn::Tensor> best(params.all().size());
  auto keep_best = [&] {
    for (const auto& p : params.all()) best[p->index] = p->value;
    if (!options.checkpoint.empty()) model.save(options.checkpoint);
  };
  keep_best();

  std::mt19937_64 shuffle_rng(options.seed);
  std::vector<std::size_t> order(inputs.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<nn::GradientBuffer> buffers;
  if (threads > 1)
    for (int t = 0; t < threads; ++t) buffers.emplace_back(params);

  int stale = 0;
  for (int epoch = 1; epoch <= options.epochs; ++epoch) {
    if (options.shuffle) std::shuffle(order.begin(), order.end(), shuffle_rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += options.batch) {
      const std::size_t end = std::min(order.size(), start + options.batch);
      params.zero_grad();
      std::vector<double> losses(end - start, 0.0);
      auto run_one = [&](std::size_t slot, nn::GradientBuffer* sink) {
        const std::size_t k = order[start + slot];
        std::seed_seq seq{options.seed, static_cast<std::uint64_t>(epoch),
                          static_cast<std::uint64_t>(k)};
        std::mt19937_64 rng(seq);
        nn::Graph graph(sink);
        SentenceSession session(model, graph, inputs[k], true, &rng);
        nn::Expr loss = model.loss(session, golds[k]);
        losses[slot] = loss.value();
        graph.backward(loss);
      };
      if (threads == 1) {
        for (std::size_t slot = 0; slot < end - start; ++slot) run_one(slot, nullptr);
      } else {
        for (auto& b : buffers) b.zero();
        std::exception_ptr error;
        const long count = static_cast<long>(end - start);
#pragma omp parallel for num_threads(threads) schedule(static)
        for (long slot = 0; slot < count; ++slot) {
          try {
            run_one(slot, &buffers[omp_get_thread_num()]);
          } catch (...) {
#pragma omp critical
            if (!error) error = std::current_exception();
          }
        }
        if (error) std::rethrow_exception(error);
        for (const auto& b : buffers) b.add_to(params);
      }
      for (double l : losses) epoch_loss += l;
      adam.step(params, schedule.rate());
    }

    EpochLog log;
    log.epoch = epoch;
    log.loss = inputs.empty() ? 0.0 : epoch_loss / inputs.size();
    log.lr = schedule.rate();
    log.dev = score(dev_set, predict(model, dev_set, dev_context, threads));
    log.improved = schedule.end_epoch(log.dev.f1());
    if (log.improved) {
      result.best_epoch = epoch;
      result.best_f1 = log.dev.f1();
      keep_best();
      stale = 0;
    } else {
      ++stale;
    }
    result.epochs.push_back(log);
    if (on_epoch) on_epoch(log);
    if (options.patience > 0 && stale >= options.patience) break;
  }

  for (const auto& p : params.all()) p->value = best[p->index];
  return result;
}

}  // namespace ptrsrl
