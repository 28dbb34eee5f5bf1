#include "ptrsrl/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <type_traits>

#include "ptrsrl/error.hpp"
#include "ptrsrl/kernels.hpp"

namespace ptrsrl::nn {

Dims Expr::dims() const { return graph->dims(id); }

std::span<const double> Expr::values() const {
  return {graph->value_ptr(id), graph->dims(id).size()};
}

int Graph::add_node(Dims dims, std::vector<int> inputs, Backward backward) {
  Node& node = nodes_.emplace_back();
  node.dims = dims;
  node.own_value.assign(dims.size(), 0.0);
  node.value = node.own_value.data();
  node.inputs = std::move(inputs);
  node.backward = std::move(backward);
  return static_cast<int>(nodes_.size()) - 1;
}

Expr Graph::parameter(Parameter& p) {
  for (const auto& [index, id] : param_nodes_)
    if (index == p.index && nodes_[id].value == p.value.values.data() &&
        nodes_[id].dims == p.dims())
      return {this, id};
  Node& node = nodes_.emplace_back();
  node.dims = p.dims();
  node.value = p.value.values.data();
  node.param_grad = sink_ ? sink_->slot(p) : p.grad.data();
  const int id = static_cast<int>(nodes_.size()) - 1;
  param_nodes_.push_back({p.index, id});
  return {this, id};
}

Expr Graph::lookup(Parameter& table, int row) {
  if (row < 0 || row >= table.dims().rows)
    throw DimensionError("lookup", "row " + std::to_string(row) + " outside table " +
                                       to_string(table.dims()));
  const int cols = table.dims().cols;
  Node& node = nodes_.emplace_back();
  node.dims = Dims{cols, 1};
  node.value = table.value.values.data() + static_cast<std::size_t>(row) * cols;
  node.param_grad = (sink_ ? sink_->slot(table) : table.grad.data()) +
                    static_cast<std::size_t>(row) * cols;
  return {this, static_cast<int>(nodes_.size()) - 1};
}

Expr Graph::constant(std::vector<double> values, Dims dims) {
  if (values.size() != dims.size())
    throw DimensionError("constant", std::to_string(values.size()) + " values for " +
                                         to_string(dims));
  Node& node = nodes_.emplace_back();
  node.dims = dims;
  node.own_value = std::move(values);
  node.value = node.own_value.data();
  return {this, static_cast<int>(nodes_.size()) - 1};
}

void Graph::backward(Expr loss) {
  if (loss.graph != this) throw ContractError("backward: expression from another graph");
  if (dims(loss.id).size() != 1)
    throw ContractError("backward: loss must be a scalar, got " + to_string(dims(loss.id)));
  for (int k = 0; k <= loss.id; ++k) {
    Node& node = nodes_[k];
    if (node.param_grad) {
      node.grad = node.param_grad;
    } else {
      node.own_grad.assign(node.dims.size(), 0.0);
      node.grad = node.own_grad.data();
    }
  }
  nodes_[loss.id].grad[0] += 1.0;
  for (int k = loss.id; k >= 0; --k) {
    if (nodes_[k].backward) nodes_[k].backward(*this, k);
  }
}

namespace {

// what is a message or a callable building one, so the happy path formats nothing
template <class What>
void require(bool ok, const char* op, What&& what) {
  if (ok) return;
  if constexpr (std::is_invocable_v<What>)
    throw DimensionError(op, what());
  else
    throw DimensionError(op, what);
}

void same_graph(Expr a, Expr b, const char* op) {
  require(a.graph == b.graph, op, "operands belong to different graphs");
}

std::string shapes(Expr a, Expr b) { return to_string(a.dims()) + " vs " + to_string(b.dims()); }

template <class Forward, class Derivative>
Expr unary(Expr x, Forward f, Derivative df) {
  Graph& g = *x.graph;
  const Dims d = x.dims();
  int id = g.add_node(d, {x.id}, [df](Graph& g, int self) {
    const int in = g.inputs(self)[0];
    const double* y = g.value_ptr(self);
    const double* xv = g.value_ptr(in);
    const double* gy = g.grad_ptr(self);
    double* gx = g.grad_ptr(in);
    const std::size_t n = g.dims(self).size();
    for (std::size_t k = 0; k < n; ++k) gx[k] += gy[k] * df(xv[k], y[k]);
  });
  double* y = g.mutable_value(id);
  const double* xv = g.value_ptr(x.id);
  for (std::size_t k = 0; k < d.size(); ++k) y[k] = f(xv[k]);
  return {&g, id};
}

}  // namespace

Expr operator+(Expr a, Expr b) {
  same_graph(a, b, "add");
  require(a.dims() == b.dims(), "add", [&] { return shapes(a, b); });
  Graph& g = *a.graph;
  int id = g.add_node(a.dims(), {a.id, b.id}, [](Graph& g, int self) {
    const auto& in = g.inputs(self);
    const double* gy = g.grad_ptr(self);
    const std::size_t n = g.dims(self).size();
    for (int src : in) {
      double* gx = g.grad_ptr(src);
      for (std::size_t k = 0; k < n; ++k) gx[k] += gy[k];
    }
  });
  double* y = g.mutable_value(id);
  const double* av = g.value_ptr(a.id);
  const double* bv = g.value_ptr(b.id);
  for (std::size_t k = 0; k < a.dims().size(); ++k) y[k] = av[k] + bv[k];
  return {&g, id};
}

Expr operator-(Expr a, Expr b) {
  same_graph(a, b, "sub");
  require(a.dims() == b.dims(), "sub", [&] { return shapes(a, b); });
  Graph& g = *a.graph;
  int id = g.add_node(a.dims(), {a.id, b.id}, [](Graph& g, int self) {
    const auto& in = g.inputs(self);
    const double* gy = g.grad_ptr(self);
    double* ga = g.grad_ptr(in[0]);
    double* gb = g.grad_ptr(in[1]);
    const std::size_t n = g.dims(self).size();
    for (std::size_t k = 0; k < n; ++k) {
      ga[k] += gy[k];
      gb[k] -= gy[k];
    }
  });
  double* y = g.mutable_value(id);
  const double* av = g.value_ptr(a.id);
  const double* bv = g.value_ptr(b.id);
  for (std::size_t k = 0; k < a.dims().size(); ++k) y[k] = av[k] - bv[k];
  return {&g, id};
}

Expr sum(const std::vector<Expr>& xs) {
  require(!xs.empty(), "sum", "no operands");
  Graph& g = *xs[0].graph;
  std::vector<int> ids;
  for (Expr x : xs) {
    same_graph(xs[0], x, "sum");
    require(x.dims() == xs[0].dims(), "sum", [&] { return shapes(xs[0], x); });
    ids.push_back(x.id);
  }
  int id = g.add_node(xs[0].dims(), ids, [](Graph& g, int self) {
    const double* gy = g.grad_ptr(self);
    const std::size_t n = g.dims(self).size();
    for (int src : g.inputs(self)) {
      double* gx = g.grad_ptr(src);
      for (std::size_t k = 0; k < n; ++k) gx[k] += gy[k];
    }
  });
  double* y = g.mutable_value(id);
  for (Expr x : xs) {
    const double* xv = g.value_ptr(x.id);
    for (std::size_t k = 0; k < xs[0].dims().size(); ++k) y[k] += xv[k];
  }
  return {&g, id};
}

Expr cmult(Expr a, Expr b) {
  same_graph(a, b, "cmult");
  require(a.dims() == b.dims(), "cmult", [&] { return shapes(a, b); });
  Graph& g = *a.graph;
  int id = g.add_node(a.dims(), {a.id, b.id}, [](Graph& g, int self) {
    const auto& in = g.inputs(self);
    const double* gy = g.grad_ptr(self);
    const double* av = g.value_ptr(in[0]);
    const double* bv = g.value_ptr(in[1]);
    double* ga = g.grad_ptr(in[0]);
    double* gb = g.grad_ptr(in[1]);
    const std::size_t n = g.dims(self).size();
    for (std::size_t k = 0; k < n; ++k) {
      ga[k] += gy[k] * bv[k];
      gb[k] += gy[k] * av[k];
    }
  });
  double* y = g.mutable_value(id);
  const double* av = g.value_ptr(a.id);
  const double* bv = g.value_ptr(b.id);
  for (std::size_t k = 0; k < a.dims().size(); ++k) y[k] = av[k] * bv[k];
  return {&g, id};
}

Expr scale(Expr a, double s) {
  return unary(
      a, [s](double x) { return s * x; }, [s](double, double) { return s; });
}

Expr add_scalar(Expr v, Expr s) {
  same_graph(v, s, "add_scalar");
  require(s.dims().size() == 1, "add_scalar",
          [&] { return "scalar operand is " + to_string(s.dims()); });
  Graph& g = *v.graph;
  int id = g.add_node(v.dims(), {v.id, s.id}, [](Graph& g, int self) {
    const auto& in = g.inputs(self);
    const double* gy = g.grad_ptr(self);
    double* gv = g.grad_ptr(in[0]);
    double* gs = g.grad_ptr(in[1]);
    const std::size_t n = g.dims(self).size();
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      gv[k] += gy[k];
      total += gy[k];
    }
    gs[0] += total;
  });
  double* y = g.mutable_value(id);
  const double* vv = g.value_ptr(v.id);
  const double sv = g.value_ptr(s.id)[0];
  for (std::size_t k = 0; k < v.dims().size(); ++k) y[k] = vv[k] + sv;
  return {&g, id};
}

Expr matvec(Expr w, Expr x) {
  same_graph(w, x, "matvec");
  const Dims wd = w.dims();
  require(x.dims() == Dims{wd.cols, 1}, "matvec", [&] { return shapes(w, x); });
  Graph& g = *w.graph;
  int id = g.add_node(Dims{wd.rows, 1}, {w.id, x.id}, [](Graph& g, int self) {
    const auto& in = g.inputs(self);
    const Dims wd = g.dims(in[0]);
    const double* gy = g.grad_ptr(self);
    kernels::ger(g.grad_ptr(in[0]), gy, g.value_ptr(in[1]), wd.rows, wd.cols);
    kernels::gemv_t_acc(g.value_ptr(in[0]), gy, g.grad_ptr(in[1]), wd.rows, wd.cols);
  });
  kernels::gemv(g.value_ptr(w.id), g.value_ptr(x.id), g.mutable_value(id), wd.rows, wd.cols);
  return {&g, id};
}

Expr matvec_t(Expr w, Expr x) {
  same_graph(w, x, "matvec_t");
  const Dims wd = w.dims();
  require(x.dims() == Dims{wd.rows, 1}, "matvec_t", [&] { return shapes(w, x); });
  Graph& g = *w.graph;
  int id = g.add_node(Dims{wd.cols, 1}, {w.id, x.id}, [](Graph& g, int self) {
    const auto& in = g.inputs(self);
    const Dims wd = g.dims(in[0]);
    const double* gy = g.grad_ptr(self);
    // y = W^T x:  dW += x gy^T,  dx += W gy
    kernels::ger(g.grad_ptr(in[0]), g.value_ptr(in[1]), gy, wd.rows, wd.cols);
    kernels::gemv_acc(g.value_ptr(in[0]), gy, g.grad_ptr(in[1]), wd.rows, wd.cols);
  });
  double* y = g.mutable_value(id);
  kernels::gemv_t_acc(g.value_ptr(w.id), g.value_ptr(x.id), y, wd.rows, wd.cols);
  return {&g, id};
}

Expr affine(Expr b, const std::vector<std::pair<Expr, Expr>>& terms) {
  Graph& g = *b.graph;
  const Dims out = b.dims();
  require(out.cols == 1, "affine", [&] { return "bias must be a vector, got " + to_string(out); });
  std::vector<int> ids{b.id};
  for (const auto& [w, x] : terms) {
    same_graph(b, w, "affine");
    same_graph(b, x, "affine");
    require(w.dims().rows == out.rows && x.dims() == Dims{w.dims().cols, 1}, "affine",
            [&] {
              return to_string(w.dims()) + " * " + to_string(x.dims()) + " into " +
                     to_string(out);
            });
    ids.push_back(w.id);
    ids.push_back(x.id);
  }
  int id = g.add_node(out, ids, [](Graph& g, int self) {
    const auto& in = g.inputs(self);
    const double* gy = g.grad_ptr(self);
    const std::size_t n = g.dims(self).size();
    double* gb = g.grad_ptr(in[0]);
    for (std::size_t k = 0; k < n; ++k) gb[k] += gy[k];
    for (std::size_t t = 1; t + 1 < in.size(); t += 2) {
      const Dims wd = g.dims(in[t]);
      kernels::ger(g.grad_ptr(in[t]), gy, g.value_ptr(in[t + 1]), wd.rows, wd.cols);
      kernels::gemv_t_acc(g.value_ptr(in[t]), gy, g.grad_ptr(in[t + 1]), wd.rows, wd.cols);
    }
  });
  double* y = g.mutable_value(id);
  std::copy_n(g.value_ptr(b.id), out.size(), y);
  for (const auto& [w, x] : terms)
    kernels::gemv_acc(g.value_ptr(w.id), g.value_ptr(x.id), y, w.dims().rows, w.dims().cols);
  return {&g, id};
}

Expr linear(Expr x, Expr w, Expr b) { return affine(b, {{w, x}}); }

Expr logistic(Expr x) {
  return unary(
      x, [](double v) { return 1.0 / (1.0 + std::exp(-v)); },
      [](double, double y) { return y * (1.0 - y); });
}

Expr tanh(Expr x) {
  return unary(
      x, [](double v) { return std::tanh(v); }, [](double, double y) { return 1.0 - y * y; });
}

Expr elu(Expr x) {
  return unary(
      x, [](double v) { return v >= 0.0 ? v : std::expm1(v); },
      [](double v, double y) { return v >= 0.0 ? 1.0 : y + 1.0; });
}

Expr concat(const std::vector<Expr>& xs) {
  require(!xs.empty(), "concat", "no operands");
  Graph& g = *xs[0].graph;
  std::vector<int> ids;
  int rows = 0;
  for (Expr x : xs) {
    same_graph(xs[0], x, "concat");
    require(x.dims().cols == 1, "concat", [&] { return "operand is " + to_string(x.dims()); });
    ids.push_back(x.id);
    rows += x.dims().rows;
  }
  int id = g.add_node(Dims{rows, 1}, ids, [](Graph& g, int self) {
    const double* gy = g.grad_ptr(self);
    std::size_t offset = 0;
    for (int src : g.inputs(self)) {
      const std::size_t n = g.dims(src).size();
      double* gx = g.grad_ptr(src);
      for (std::size_t k = 0; k < n; ++k) gx[k] += gy[offset + k];
      offset += n;
    }
  });
  double* y = g.mutable_value(id);
  for (Expr x : xs) {
    std::copy_n(g.value_ptr(x.id), x.dims().size(), y);
    y += x.dims().size();
  }
  return {&g, id};
}

Expr stack_rows(const std::vector<Expr>& xs) {
  require(!xs.empty(), "stack_rows", "no operands");
  for (Expr x : xs)
    require(x.dims() == xs[0].dims() && x.dims().cols == 1, "stack_rows",
            [&] { return shapes(xs[0], x); });
  Expr flat = concat(xs);
  // Same storage layout; only the shape changes.
  Graph& g = *flat.graph;
  const Dims d{static_cast<int>(xs.size()), xs[0].dims().rows};
  int id = g.add_node(d, {flat.id}, [](Graph& g, int self) {
    const std::size_t n = g.dims(self).size();
    const double* gy = g.grad_ptr(self);
    double* gx = g.grad_ptr(g.inputs(self)[0]);
    for (std::size_t k = 0; k < n; ++k) gx[k] += gy[k];
  });
  std::copy_n(g.value_ptr(flat.id), d.size(), g.mutable_value(id));
  return {&g, id};
}

Expr slice(Expr x, int start, int length) {
  require(x.dims().cols == 1 && start >= 0 && length >= 0 && start + length <= x.dims().rows,
          "slice", [&] {
            return "[" + std::to_string(start) + ", +" + std::to_string(length) + ") of " +
                   to_string(x.dims());
          });
  Graph& g = *x.graph;
  int id = g.add_node(Dims{length, 1}, {x.id}, [start](Graph& g, int self) {
    const std::size_t n = g.dims(self).size();
    const double* gy = g.grad_ptr(self);
    double* gx = g.grad_ptr(g.inputs(self)[0]) + start;
    for (std::size_t k = 0; k < n; ++k) gx[k] += gy[k];
  });
  std::copy_n(g.value_ptr(x.id) + start, length, g.mutable_value(id));
  return {&g, id};
}

Expr dot(Expr a, Expr b) {
  same_graph(a, b, "dot");
  require(a.dims() == b.dims(), "dot", [&] { return shapes(a, b); });
  Graph& g = *a.graph;
  int id = g.add_node(Dims{1, 1}, {a.id, b.id}, [](Graph& g, int self) {
    const auto& in = g.inputs(self);
    const double gy = g.grad_ptr(self)[0];
    const double* av = g.value_ptr(in[0]);
    const double* bv = g.value_ptr(in[1]);
    double* ga = g.grad_ptr(in[0]);
    double* gb = g.grad_ptr(in[1]);
    const std::size_t n = g.dims(in[0]).size();
    for (std::size_t k = 0; k < n; ++k) {
      ga[k] += gy * bv[k];
      gb[k] += gy * av[k];
    }
  });
  const double* av = g.value_ptr(a.id);
  const double* bv = g.value_ptr(b.id);
  double acc = 0.0;
  for (std::size_t k = 0; k < a.dims().size(); ++k) acc += av[k] * bv[k];
  g.mutable_value(id)[0] = acc;
  return {&g, id};
}

Expr sum_elements(Expr x) {
  Graph& g = *x.graph;
  int id = g.add_node(Dims{1, 1}, {x.id}, [](Graph& g, int self) {
    const int in = g.inputs(self)[0];
    const double gy = g.grad_ptr(self)[0];
    double* gx = g.grad_ptr(in);
    for (std::size_t k = 0; k < g.dims(in).size(); ++k) gx[k] += gy;
  });
  const double* xv = g.value_ptr(x.id);
  double acc = 0.0;
  for (std::size_t k = 0; k < x.dims().size(); ++k) acc += xv[k];
  g.mutable_value(id)[0] = acc;
  return {&g, id};
}

Expr outer(Expr a, Expr b) {
  same_graph(a, b, "outer");
  require(a.dims().cols == 1 && b.dims().cols == 1, "outer", [&] { return shapes(a, b); });
  Graph& g = *a.graph;
  const int ra = a.dims().rows;
  const int rb = b.dims().rows;
  int id = g.add_node(Dims{ra * rb, 1}, {a.id, b.id}, [ra, rb](Graph& g, int self) {
    const auto& in = g.inputs(self);
    const double* gy = g.grad_ptr(self);
    // gy viewed as ra x rb matrix G:  da += G b,  db += G^T a
    kernels::gemv_acc(gy, g.value_ptr(in[1]), g.grad_ptr(in[0]), ra, rb);
    kernels::gemv_t_acc(gy, g.value_ptr(in[0]), g.grad_ptr(in[1]), ra, rb);
  });
  double* y = g.mutable_value(id);
  const double* av = g.value_ptr(a.id);
  const double* bv = g.value_ptr(b.id);
  for (int i = 0; i < ra; ++i)
    for (int j = 0; j < rb; ++j) y[i * rb + j] = av[i] * bv[j];
  return {&g, id};
}

Expr bilinear(Expr a, Expr w, Expr b) { return dot(a, matvec(w, b)); }

Expr log_softmax(Expr v) {
  require(v.dims().cols == 1, "log_softmax", [&] { return "operand is " + to_string(v.dims()); });
  Graph& g = *v.graph;
  const std::size_t n = v.dims().size();
  require(n > 0, "log_softmax", "empty vector");
  int id = g.add_node(v.dims(), {v.id}, [](Graph& g, int self) {
    const int in = g.inputs(self)[0];
    const std::size_t n = g.dims(self).size();
    const double* y = g.value_ptr(self);
    const double* gy = g.grad_ptr(self);
    double* gx = g.grad_ptr(in);
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k) total += gy[k];
    for (std::size_t k = 0; k < n; ++k) gx[k] += gy[k] - std::exp(y[k]) * total;
  });
  const double* xv = g.value_ptr(v.id);
  const double m = *std::max_element(xv, xv + n);
  double z = 0.0;
  for (std::size_t k = 0; k < n; ++k) z += std::exp(xv[k] - m);
  const double lz = m + std::log(z);
  double* y = g.mutable_value(id);
  for (std::size_t k = 0; k < n; ++k) y[k] = xv[k] - lz;
  return {&g, id};
}

Expr softmax(Expr v) {
  require(v.dims().cols == 1, "softmax", [&] { return "operand is " + to_string(v.dims()); });
  Graph& g = *v.graph;
  const std::size_t n = v.dims().size();
  require(n > 0, "softmax", "empty vector");
  int id = g.add_node(v.dims(), {v.id}, [](Graph& g, int self) {
    const int in = g.inputs(self)[0];
    const std::size_t n = g.dims(self).size();
    const double* y = g.value_ptr(self);
    const double* gy = g.grad_ptr(self);
    double* gx = g.grad_ptr(in);
    double inner = 0.0;
    for (std::size_t k = 0; k < n; ++k) inner += gy[k] * y[k];
    for (std::size_t k = 0; k < n; ++k) gx[k] += y[k] * (gy[k] - inner);
  });
  const double* xv = g.value_ptr(v.id);
  const double m = *std::max_element(xv, xv + n);
  double* y = g.mutable_value(id);
  double z = 0.0;
  for (std::size_t k = 0; k < n; ++k) z += (y[k] = std::exp(xv[k] - m));
  for (std::size_t k = 0; k < n; ++k) y[k] /= z;
  return {&g, id};
}

Expr pick(Expr v, int index) {
  require(index >= 0 && static_cast<std::size_t>(index) < v.dims().size(), "pick",
          [&] { return "index " + std::to_string(index) + " outside " + to_string(v.dims()); });
  Graph& g = *v.graph;
  int id = g.add_node(Dims{1, 1}, {v.id}, [index](Graph& g, int self) {
    g.grad_ptr(g.inputs(self)[0])[index] += g.grad_ptr(self)[0];
  });
  g.mutable_value(id)[0] = g.value_ptr(v.id)[index];
  return {&g, id};
}

Expr pick_neg_log_softmax(Expr v, int gold) {
  return scale(pick(log_softmax(v), gold), -1.0);
}

Expr cross_entropy(Expr probabilities, int gold) {
  require(gold >= 0 && static_cast<std::size_t>(gold) < probabilities.dims().size(),
          "cross_entropy", [&] { return "gold index " + std::to_string(gold) + " outside " +
                               to_string(probabilities.dims()); });
  Graph& g = *probabilities.graph;
  int id = g.add_node(Dims{1, 1}, {probabilities.id}, [gold](Graph& g, int self) {
    const int in = g.inputs(self)[0];
    g.grad_ptr(in)[gold] -= g.grad_ptr(self)[0] / g.value_ptr(in)[gold];
  });
  g.mutable_value(id)[0] = -std::log(g.value_ptr(probabilities.id)[gold]);
  return {&g, id};
}

Expr embed(Graph& g, Parameter& table, int index) { return g.lookup(table, index); }

Expr conv1d_maxpool(Expr seq, Expr filters, Expr bias, int window) {
  same_graph(seq, filters, "conv1d_maxpool");
  same_graph(seq, bias, "conv1d_maxpool");
  const Dims sd = seq.dims();
  const Dims fd = filters.dims();
  require(window >= 1 && sd.rows >= window, "conv1d_maxpool",
          [&] { return "sequence of " + std::to_string(sd.rows) + " rows shorter than window " +
              std::to_string(window); });
  require(fd.cols == window * sd.cols, "conv1d_maxpool",
          [&] {
            return "filters " + to_string(fd) + " for window " + std::to_string(window) +
                   " over " + to_string(sd);
          });
  require(bias.dims() == Dims{fd.rows, 1}, "conv1d_maxpool",
          [&] { return "bias " + to_string(bias.dims()); });
  Graph& g = *seq.graph;
  const int positions = sd.rows - window + 1;
  const int span = window * sd.cols;
  // argmax position per filter, filled by the forward pass
  auto argmax = std::make_shared<std::vector<int>>(fd.rows, 0);
  int id = g.add_node(Dims{fd.rows, 1}, {seq.id, filters.id, bias.id},
                      [argmax, span](Graph& g, int self) {
                        const auto& in = g.inputs(self);
                        const double* gy = g.grad_ptr(self);
                        const double* xv = g.value_ptr(in[0]);
                        const double* fv = g.value_ptr(in[1]);
                        double* gx = g.grad_ptr(in[0]);
                        double* gf = g.grad_ptr(in[1]);
                        double* gb = g.grad_ptr(in[2]);
                        const int cols = g.dims(in[0]).cols;
                        for (std::size_t f = 0; f < argmax->size(); ++f) {
                          const double* window_in =
                              xv + static_cast<std::size_t>((*argmax)[f]) * cols;
                          double* window_grad = gx + static_cast<std::size_t>((*argmax)[f]) * cols;
                          const double* row = fv + f * span;
                          double* grow = gf + f * span;
                          for (int k = 0; k < span; ++k) {
                            grow[k] += gy[f] * window_in[k];
                            window_grad[k] += gy[f] * row[k];
                          }
                          gb[f] += gy[f];
                        }
                      });
  const double* xv = g.value_ptr(seq.id);
  const double* fv = g.value_ptr(filters.id);
  const double* bv = g.value_ptr(bias.id);
  double* y = g.mutable_value(id);
  std::vector<double> responses(fd.rows);
  for (int f = 0; f < fd.rows; ++f) y[f] = -std::numeric_limits<double>::infinity();
  for (int pos = 0; pos < positions; ++pos) {
    // Rows pos..pos+window-1 are contiguous, so the window is one flat span.
    kernels::gemv(fv, xv + static_cast<std::size_t>(pos) * sd.cols, responses.data(), fd.rows,
                  span);
    for (int f = 0; f < fd.rows; ++f) {
      const double r = responses[f] + bv[f];
      if (r > y[f]) {
        y[f] = r;
        (*argmax)[f] = pos;
      }
    }
  }
  return {&g, id};
}

std::vector<double> dropout_mask(std::size_t size, double rate, std::mt19937_64& rng) {
  std::vector<double> mask(size, 1.0);
  if (rate <= 0.0) return mask;
  std::bernoulli_distribution keep(1.0 - rate);
  const double s = 1.0 / (1.0 - rate);
  for (double& m : mask) m = keep(rng) ? s : 0.0;
  return mask;
}

Expr apply_mask(Expr x, const std::vector<double>& mask) {
  require(mask.size() == x.dims().size(), "dropout",
          [&] { return "mask of " + std::to_string(mask.size()) + " for " + to_string(x.dims()); });
  return cmult(x, x.graph->constant(mask, x.dims()));
}

Expr dropout(Expr x, double rate, bool train, std::mt19937_64& rng) {
  if (!train || rate <= 0.0) return x;
  return apply_mask(x, dropout_mask(x.dims().size(), rate, rng));
}

}  // namespace ptrsrl::nn
