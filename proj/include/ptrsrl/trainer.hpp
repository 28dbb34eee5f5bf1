#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ptrsrl/conll.hpp"
#include "ptrsrl/model.hpp"
#include "ptrsrl/optimizer.hpp"
#include "ptrsrl/scorer.hpp"

namespace ptrsrl {

struct TrainOptions {
  int epochs = 600;
  int batch = 32;
  int patience = 0;  // stop after this many epochs without dev gain; 0 disables
  int threads = 1;
  std::uint64_t seed = 1;
  bool shuffle = true;
  nn::OptimizerConfig optimizer;
  std::string checkpoint;  // best-dev checkpoint path; empty to skip writing
};

struct EpochLog {
  int epoch = 0;
  double loss = 0.0;  // mean per training sentence
  double lr = 0.0;
  ScoreReport dev;
  bool improved = false;
};

struct TrainResult {
  std::vector<EpochLog> epochs;
  int best_epoch = 0;
  double best_f1 = 0.0;
};

/// Copies sentences with gold annotation removed as the model's mode requires.
std::vector<Sentence> strip_for(const ModelConfig& config, const std::vector<Sentence>& gold);

/// Decodes stripped copies of the sentences and converts the graphs back to
/// CoNLL frames. context may be null. repairs, when given, accumulates the
/// number of root arcs added for argument heads without one.
std::vector<Sentence> predict(const PointerModel& model, const std::vector<Sentence>& sentences,
                              const ContextVectors* context, int threads,
                              int* repairs = nullptr);

/// Trains with Adam on the joint loss. After every epoch the dev set is
/// decoded and scored; the parameters with the best dev F1 are kept in the
/// model (and written to options.checkpoint when set).
TrainResult train(PointerModel& model, const std::vector<Sentence>& train_set,
                  const ContextVectors* train_context, const std::vector<Sentence>& dev_set,
                  const ContextVectors* dev_context, const TrainOptions& options,
                  const std::function<void(const EpochLog&)>& on_epoch = {});

}  // namespace ptrsrl
