#include "ptrsrl/tensor.hpp"

#include <cmath>

#include "ptrsrl/error.hpp"

namespace ptrsrl::nn {

std::string to_string(const Dims& d) {
  return std::to_string(d.rows) + "x" + std::to_string(d.cols);
}

Parameter& ParameterStore::add(const std::string& name, Dims dims, Init init,
                               std::mt19937_64& rng) {
  if (by_name_.count(name)) throw ContractError("duplicate parameter name '" + name + "'");
  auto p = std::make_unique<Parameter>();
  p->name = name;
  p->value = Tensor(dims);
  p->grad.assign(dims.size(), 0.0);
  p->adam_m.assign(dims.size(), 0.0);
  p->adam_v.assign(dims.size(), 0.0);
  p->index = static_cast<int>(params_.size());
  switch (init) {
    case Init::kZeros:
      break;
    case Init::kGlorot: {
      const double bound = std::sqrt(6.0 / (dims.rows + dims.cols));
      std::uniform_real_distribution<double> dist(-bound, bound);
      for (double& v : p->value.values) v = dist(rng);
      break;
    }
    case Init::kEmbedding: {
      std::normal_distribution<double> dist(0.0, 0.01);
      for (double& v : p->value.values) v = dist(rng);
      break;
    }
  }
  Parameter& ref = *p;
  by_name_[name] = p.get();
  params_.push_back(std::move(p));
  return ref;
}

Parameter& ParameterStore::get(const std::string& name) {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) throw ContractError("no parameter named '" + name + "'");
  return *it->second;
}

const Parameter& ParameterStore::get(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) throw ContractError("no parameter named '" + name + "'");
  return *it->second;
}

std::size_t ParameterStore::scalar_count() const {
  std::size_t total = 0;
  for (const auto& p : params_) total += p->size();
  return total;
}

void ParameterStore::zero_grad() {
  for (auto& p : params_) std::fill(p->grad.begin(), p->grad.end(), 0.0);
}

GradientBuffer::GradientBuffer(const ParameterStore& store) {
  for (const auto& p : store.all()) grads_.emplace_back(p->size(), 0.0);
}

void GradientBuffer::zero() {
  for (auto& g : grads_) std::fill(g.begin(), g.end(), 0.0);
}

void GradientBuffer::add_to(ParameterStore& store) const {
  for (const auto& p : store.all()) {
    const auto& g = grads_[p->index];
    for (std::size_t k = 0; k < g.size(); ++k) p->grad[k] += g[k];
  }
}

}  // namespace ptrsrl::nn
