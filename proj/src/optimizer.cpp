#include "ptrsrl/optimizer.hpp"

#include <cmath>

namespace ptrsrl::nn {

double clip_global_norm(ParameterStore& store, double max_norm) {
  double sq = 0.0;
  for (const auto& p : store.all())
    for (double g : p->grad) sq += g * g;
  const double norm = std::sqrt(sq);
  if (max_norm > 0.0 && norm > max_norm) {
    const double s = max_norm / norm;
    for (const auto& p : store.all())
      for (double& g : p->grad) g *= s;
  }
  return norm;
}

void Adam::step(ParameterStore& store, double lr) {
  clip_global_norm(store, config_.clip);
  ++steps_;
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, steps_);
  const double c2 = 1.0 - std::pow(b2, steps_);
  for (const auto& p : store.all()) {
    double* w = p->value.values.data();
    for (std::size_t k = 0; k < p->size(); ++k) {
      const double g = p->grad[k];
      double& m = p->adam_m[k];
      double& v = p->adam_v[k];
      m = b1 * m + (1.0 - b1) * g;
      v = b2 * v + (1.0 - b2) * g * g;
      w[k] -= lr * (m / c1) / (std::sqrt(v / c2) + config_.epsilon);
    }
  }
}

double LearningRateSchedule::rate() const {
  return config_.lr0 * std::pow(config_.decay, decays_);
}

bool LearningRateSchedule::end_epoch(double dev_score) {
  if (dev_score > best_) {
    best_ = dev_score;
    stale_ = 0;
    return true;
  }
  if (++stale_ >= config_.decay_patience) {
    ++decays_;
    stale_ = 0;
  }
  return false;
}

}  // namespace ptrsrl::nn
