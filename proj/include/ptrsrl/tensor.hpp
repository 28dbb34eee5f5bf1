#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace ptrsrl::nn {

/// Matrix shape; vectors are rows x 1.
struct Dims {
  int rows = 0;
  int cols = 1;

  std::size_t size() const { return static_cast<std::size_t>(rows) * cols; }
  bool operator==(const Dims&) const = default;
};

std::string to_string(const Dims& d);

struct Tensor {
  Dims dims;
  std::vector<double> values;  // row-major

  Tensor() = default;
  explicit Tensor(Dims d, double fill = 0.0) : dims(d), values(d.size(), fill) {}
  double& at(int r, int c = 0) { return values[static_cast<std::size_t>(r) * dims.cols + c]; }
  double at(int r, int c = 0) const {
    return values[static_cast<std::size_t>(r) * dims.cols + c];
  }
};

enum class Init { kZeros, kGlorot, kEmbedding };

struct Parameter {
  std::string name;
  Tensor value;
  std::vector<double> grad;
  std::vector<double> adam_m;
  std::vector<double> adam_v;
  int index = 0;  // position in the owning store

  Dims dims() const { return value.dims; }
  std::size_t size() const { return value.values.size(); }
};

/// Owns every learnable tensor of a model. Parameter addresses are stable.
class ParameterStore {
 public:
  /// Throws ContractError on a duplicate name.
  Parameter& add(const std::string& name, Dims dims, Init init, std::mt19937_64& rng);
  Parameter& get(const std::string& name);
  const Parameter& get(const std::string& name) const;
  bool contains(const std::string& name) const { return by_name_.count(name) != 0; }

  const std::vector<std::unique_ptr<Parameter>>& all() const { return params_; }
  std::size_t scalar_count() const;
  void zero_grad();

 private:
  std::vector<std::unique_ptr<Parameter>> params_;
  std::map<std::string, Parameter*> by_name_;
};

/// Per-thread gradient accumulator shaped like a ParameterStore.
class GradientBuffer {
 public:
  explicit GradientBuffer(const ParameterStore& store);
  double* slot(const Parameter& p) { return grads_[p.index].data(); }
  void zero();
  /// grad += buffer, for every parameter of the store.
  void add_to(ParameterStore& store) const;

 private:
  std::vector<std::vector<double>> grads_;
};

}  // namespace ptrsrl::nn
