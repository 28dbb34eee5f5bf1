#pragma once

#include <deque>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "ptrsrl/tensor.hpp"

namespace ptrsrl::nn {

class Graph;

/// Handle to a node of a Graph.
struct Expr {
  Graph* graph = nullptr;
  int id = -1;

  bool valid() const { return graph != nullptr; }
  Dims dims() const;
  std::span<const double> values() const;
  double value(std::size_t k = 0) const { return values()[k]; }
};

/// Dynamic reverse-mode tape. Nodes are appended in topological order;
/// backward() walks them in reverse. Parameter nodes alias the parameter
/// storage, so gradients land directly in Parameter::grad (or in the
/// GradientBuffer passed at construction).
class Graph {
 public:
  explicit Graph(GradientBuffer* sink = nullptr) : sink_(sink) {}
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Expr parameter(Parameter& p);
  /// Row `row` of an embedding table as a column vector.
  Expr lookup(Parameter& table, int row);
  Expr constant(std::vector<double> values, Dims dims);
  Expr constant(std::vector<double> values) {
    const int n = static_cast<int>(values.size());
    return constant(std::move(values), Dims{n, 1});
  }
  Expr zeros(Dims dims) { return constant(std::vector<double>(dims.size(), 0.0), dims); }

  /// Accumulates d(loss)/d(node) for every node. loss must be 1x1.
  void backward(Expr loss);

  std::size_t size() const { return nodes_.size(); }

  // Node plumbing for the operations in this header.
  using Backward = std::function<void(Graph&, int)>;
  int add_node(Dims dims, std::vector<int> inputs, Backward backward);
  double* mutable_value(int id) { return nodes_[id].own_value.data(); }
  const double* value_ptr(int id) const { return nodes_[id].value; }
  double* grad_ptr(int id) { return nodes_[id].grad; }
  Dims dims(int id) const { return nodes_[id].dims; }
  const std::vector<int>& inputs(int id) const { return nodes_[id].inputs; }

 private:
  struct Node {
    Dims dims;
    std::vector<double> own_value;
    std::vector<double> own_grad;
    const double* value = nullptr;
    double* grad = nullptr;
    double* param_grad = nullptr;
    std::vector<int> inputs;
    Backward backward;
  };
  std::deque<Node> nodes_;
  std::vector<std::pair<int, int>> param_nodes_;  // (param index, node id)
  GradientBuffer* sink_;
};

// Elementwise and linear-algebra primitives. Every one checks shapes and
// throws DimensionError naming itself.
Expr operator+(Expr a, Expr b);
Expr operator-(Expr a, Expr b);
Expr sum(const std::vector<Expr>& xs);
Expr cmult(Expr a, Expr b);
Expr scale(Expr a, double s);
Expr add_scalar(Expr v, Expr s);
Expr matvec(Expr w, Expr x);
Expr matvec_t(Expr w, Expr x);
/// b + sum_k W_k x_k
Expr affine(Expr b, const std::vector<std::pair<Expr, Expr>>& terms);
Expr logistic(Expr x);
Expr tanh(Expr x);
/// ELU with alpha = 1.
Expr elu(Expr x);
Expr concat(const std::vector<Expr>& xs);
/// k vectors of dimension d -> k x d matrix.
Expr stack_rows(const std::vector<Expr>& xs);
Expr slice(Expr x, int start, int length);
Expr dot(Expr a, Expr b);
Expr sum_elements(Expr x);
/// a (x) b flattened row-major: element i*|b|+j is a_i * b_j.
Expr outer(Expr a, Expr b);
/// a^T W b
Expr bilinear(Expr a, Expr w, Expr b);
Expr softmax(Expr v);
Expr log_softmax(Expr v);
Expr pick(Expr v, int index);
/// -log softmax(v)[gold]
Expr pick_neg_log_softmax(Expr v, int gold);
/// -log p[gold] for a probability vector p.
Expr cross_entropy(Expr probabilities, int gold);
Expr embed(Graph& g, Parameter& table, int index);
/// Valid 1-D convolution over the rows of seq (L x c) with filters
/// (f x window*c) and bias (f), then max over positions. Requires L >= window.
Expr conv1d_maxpool(Expr seq, Expr filters, Expr bias, int window);
Expr linear(Expr x, Expr w, Expr b);

/// Inverted dropout: identity when train is false.
Expr dropout(Expr x, double rate, bool train, std::mt19937_64& rng);
/// Inverted-dropout mask, scaled by 1/(1-rate).
std::vector<double> dropout_mask(std::size_t size, double rate, std::mt19937_64& rng);
Expr apply_mask(Expr x, const std::vector<double>& mask);

}  // namespace ptrsrl::nn
