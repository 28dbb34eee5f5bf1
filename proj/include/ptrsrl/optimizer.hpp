#pragma once

#include "ptrsrl/tensor.hpp"

namespace ptrsrl::nn {

struct OptimizerConfig {
  double lr0 = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.9;
  double decay = 0.75;
  double clip = 5.0;
  double epsilon = 1e-8;
  /// Epochs without a dev improvement before the learning rate is decayed.
  int decay_patience = 10;
};

/// Rescales all gradients so their joint L2 norm is at most max_norm.
/// Returns the norm before clipping.
double clip_global_norm(ParameterStore& store, double max_norm);

/// Bias-corrected Adam. step() counts updates from 1.
class Adam {
 public:
  explicit Adam(OptimizerConfig config = {}) : config_(config) {}

  /// Clips, then updates every parameter with learning rate lr.
  void step(ParameterStore& store, double lr);
  int steps() const { return steps_; }
  const OptimizerConfig& config() const { return config_; }

 private:
  OptimizerConfig config_;
  int steps_ = 0;
};

/// lr = lr0 * decay^k, where k counts how many times `decay_patience`
/// consecutive epochs passed without improving the dev score.
class LearningRateSchedule {
 public:
  explicit LearningRateSchedule(OptimizerConfig config = {}) : config_(config) {}

  double rate() const;
  /// Reports one finished epoch. Returns true if the score improved.
  bool end_epoch(double dev_score);
  int decays() const { return decays_; }

 private:
  OptimizerConfig config_;
  double best_ = -1.0;
  int stale_ = 0;
  int decays_ = 0;
};

}  // namespace ptrsrl::nn
