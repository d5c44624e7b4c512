#pragma once

// Reverse-mode automatic differentiation over dense Eigen matrices.
//
// A Graph is a tape for one forward computation (typically one sentence). Nodes
// are appended in evaluation order, so reverse index order is a valid reverse
// topological order. Parameters live outside the graph in a ParameterSet and
// enter it as leaves; backward() writes their gradients into a separate
// Gradients buffer, so several graphs over the same parameters can run
// independently and be reduced afterwards.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hptr/error.hpp"

namespace hptr::ad {

template <class T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
using Index = Eigen::Index;

struct ParamId {
  std::uint32_t index = 0;
};

template <class T>
struct Parameter {
  std::string name;
  Matrix<T> value;
};

template <class T>
class ParameterSet {
 public:
  ParamId add(std::string name, Matrix<T> value) {
    if (index_.count(name)) throw UsageError("duplicate parameter '" + name + "'");
    const auto id = static_cast<std::uint32_t>(params_.size());
    index_.emplace(name, id);
    params_.push_back({std::move(name), std::move(value)});
    return ParamId{id};
  }

  std::size_t size() const { return params_.size(); }
  Parameter<T>& operator[](ParamId id) { return params_[id.index]; }
  const Parameter<T>& operator[](ParamId id) const { return params_[id.index]; }
  Parameter<T>& at(std::size_t i) { return params_.at(i); }
  const Parameter<T>& at(std::size_t i) const { return params_.at(i); }

  std::optional<ParamId> find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return ParamId{it->second};
  }

  std::size_t total_size() const {
    std::size_t n = 0;
    for (const auto& p : params_) n += static_cast<std::size_t>(p.value.size());
    return n;
  }

  template <class U>
  ParameterSet<U> cast() const {
    ParameterSet<U> out;
    for (const auto& p : params_) out.add(p.name, p.value.template cast<U>());
    return out;
  }

 private:
  std::vector<Parameter<T>> params_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

// Per-parameter gradient buffers, allocated on first touch.
template <class T>
class Gradients {
 public:
  Gradients() = default;
  explicit Gradients(const ParameterSet<T>& params) { reset(params); }

  void reset(const ParameterSet<T>& params) {
    grads_.assign(params.size(), Matrix<T>());
    shapes_.clear();
    for (std::size_t i = 0; i < params.size(); ++i)
      shapes_.emplace_back(params.at(i).value.rows(), params.at(i).value.cols());
  }

  std::size_t size() const { return grads_.size(); }

  void accumulate(ParamId id, const Matrix<T>& g) {
    auto& dst = grads_[id.index];
    if (dst.size() == 0)
      dst = g;
    else
      dst += g;
  }

  bool touched(ParamId id) const { return grads_[id.index].size() != 0; }
  const Matrix<T>& raw(ParamId id) const { return grads_[id.index]; }

  Matrix<T> dense(ParamId id) const {
    if (touched(id)) return grads_[id.index];
    auto [r, c] = shapes_[id.index];
    return Matrix<T>::Zero(r, c);
  }

  void add(const Gradients& other) {
    for (std::size_t i = 0; i < grads_.size(); ++i)
      if (other.grads_[i].size() != 0) accumulate(ParamId{static_cast<std::uint32_t>(i)}, other.grads_[i]);
  }

  void scale(T factor) {
    for (auto& g : grads_)
      if (g.size() != 0) g *= factor;
  }

  double squared_norm() const {
    double s = 0.0;
    for (const auto& g : grads_)
      if (g.size() != 0) s += static_cast<double>(g.squaredNorm());
    return s;
  }

  bool all_finite() const {
    for (const auto& g : grads_)
      if (g.size() != 0 && !g.allFinite()) return false;
    return true;
  }

 private:
  std::vector<Matrix<T>> grads_;
  std::vector<std::pair<Index, Index>> shapes_;
};

struct Var {
  std::uint32_t id = std::numeric_limits<std::uint32_t>::max();
  bool valid() const { return id != std::numeric_limits<std::uint32_t>::max(); }
};

template <class T>
class Graph {
 public:
  using Mat = Matrix<T>;
  using BackwardFn = std::function<void(Graph&, const Mat&)>;

  explicit Graph(const ParameterSet<T>& params) : params_(&params), param_leaf_(params.size()) {}
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  const ParameterSet<T>& parameters() const { return *params_; }
  std::size_t node_count() const { return nodes_.size(); }
  const Mat& value(Var v) const { return nodes_[v.id].value; }
  Index rows(Var v) const { return nodes_[v.id].value.rows(); }
  Index cols(Var v) const { return nodes_[v.id].value.cols(); }
  T scalar(Var v) const { return nodes_[v.id].value(0, 0); }

  // Leaf for a parameter; each parameter appears once per graph.
  Var param(ParamId id) {
    auto& cached = param_leaf_[id.index];
    if (cached.valid()) return cached;
    Node node;
    node.value = (*params_)[id].value;
    node.param = static_cast<int>(id.index);
    nodes_.push_back(std::move(node));
    cached = Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
    return cached;
  }

  Var constant(Mat value) { return push("constant", std::move(value), nullptr); }

  Var add(Var a, Var b) {
    same_shape("add", a, b);
    return push("add", value(a) + value(b), [a, b](Graph& g, const Mat& d) {
      g.acc(a, d);
      g.acc(b, d);
    });
  }

  Var sub(Var a, Var b) {
    same_shape("sub", a, b);
    return push("sub", value(a) - value(b), [a, b](Graph& g, const Mat& d) {
      g.acc(a, d);
      g.acc(b, -d);
    });
  }

  // Elementwise product.
  Var mul(Var a, Var b) {
    same_shape("mul", a, b);
    return push("mul", value(a).cwiseProduct(value(b)), [a, b](Graph& g, const Mat& d) {
      g.acc(a, d.cwiseProduct(g.value(b)));
      g.acc(b, d.cwiseProduct(g.value(a)));
    });
  }

  Var scale(Var a, T factor) {
    return push("scale", value(a) * factor, [a, factor](Graph& g, const Mat& d) { g.acc(a, d * factor); });
  }

  Var matmul(Var a, Var b) {
    if (cols(a) != rows(b)) shape_error("matmul", a, b);
    return push("matmul", value(a) * value(b), [a, b](Graph& g, const Mat& d) {
      g.acc(a, d * g.value(b).transpose());
      g.acc(b, g.value(a).transpose() * d);
    });
  }

  Var transpose(Var a) {
    return push("transpose", value(a).transpose(), [a](Graph& g, const Mat& d) { g.acc(a, d.transpose()); });
  }

  // m (r x c) + column vector (r x 1) broadcast over columns.
  Var add_bias(Var m, Var bias) {
    if (cols(bias) != 1 || rows(bias) != rows(m)) shape_error("add_bias", m, bias);
    Mat out = value(m);
    out.colwise() += value(bias).col(0);
    return push("add_bias", std::move(out), [m, bias](Graph& g, const Mat& d) {
      g.acc(m, d);
      g.acc(bias, d.rowwise().sum());
    });
  }

  // Adds a 1x1 node to every entry.
  Var add_scalar(Var m, Var s) {
    if (rows(s) != 1 || cols(s) != 1) shape_error("add_scalar", m, s);
    Mat out = value(m).array() + value(s)(0, 0);
    return push("add_scalar", std::move(out), [m, s](Graph& g, const Mat& d) {
      g.acc(m, d);
      g.acc(s, Mat::Constant(1, 1, d.sum()));
    });
  }

  // Vertical stack of blocks with equal column counts.
  Var concat_rows(std::span<const Var> parts) {
    if (parts.empty()) throw UsageError("concat_rows of nothing");
    Index total = 0;
    for (Var p : parts) {
      if (cols(p) != cols(parts[0])) shape_error("concat_rows", parts[0], p);
      total += rows(p);
    }
    Mat out(total, cols(parts[0]));
    Index off = 0;
    for (Var p : parts) out.middleRows(off, rows(p)) = value(p), off += rows(p);
    std::vector<Var> ps(parts.begin(), parts.end());
    return push("concat_rows", std::move(out), [ps](Graph& g, const Mat& d) {
      Index o = 0;
      for (Var p : ps) g.acc(p, d.middleRows(o, g.rows(p))), o += g.rows(p);
    });
  }
  Var concat_rows(std::initializer_list<Var> parts) { return concat_rows(std::span<const Var>(parts.begin(), parts.size())); }

  // Horizontal stack of blocks with equal row counts.
  Var concat_cols(std::span<const Var> parts) {
    if (parts.empty()) throw UsageError("concat_cols of nothing");
    Index total = 0;
    for (Var p : parts) {
      if (rows(p) != rows(parts[0])) shape_error("concat_cols", parts[0], p);
      total += cols(p);
    }
    Mat out(rows(parts[0]), total);
    Index off = 0;
    for (Var p : parts) out.middleCols(off, cols(p)) = value(p), off += cols(p);
    std::vector<Var> ps(parts.begin(), parts.end());
    return push("concat_cols", std::move(out), [ps](Graph& g, const Mat& d) {
      Index o = 0;
      for (Var p : ps) g.acc(p, d.middleCols(o, g.cols(p))), o += g.cols(p);
    });
  }

  Var slice_rows(Var a, Index begin, Index count) {
    if (begin < 0 || count < 0 || begin + count > rows(a)) throw UsageError("slice_rows out of range");
    return push("slice_rows", value(a).middleRows(begin, count), [a, begin, count](Graph& g, const Mat& d) {
      Mat full = Mat::Zero(g.rows(a), g.cols(a));
      full.middleRows(begin, count) = d;
      g.acc(a, full);
    });
  }

  Var col(Var a, Index j) {
    if (j < 0 || j >= cols(a)) throw UsageError("col index out of range");
    return push("col", value(a).col(j), [a, j](Graph& g, const Mat& d) {
      Mat full = Mat::Zero(g.rows(a), g.cols(a));
      full.col(j) = d.col(0);
      g.acc(a, full);
    });
  }

  // Column-major reinterpretation.
  Var reshape(Var a, Index r, Index c) {
    if (r * c != value(a).size()) throw UsageError("reshape size mismatch");
    Mat out = Eigen::Map<const Mat>(value(a).data(), r, c);
    return push("reshape", std::move(out), [a](Graph& g, const Mat& d) {
      g.acc(a, Eigen::Map<const Mat>(d.data(), g.rows(a), g.cols(a)));
    });
  }

  Var tanh(Var a) {
    Mat y = value(a).array().tanh();
    Var out = push("tanh", std::move(y), nullptr);
    set_backward(out, [a, out](Graph& g, const Mat& d) {
      const Mat& y = g.value(out);
      g.acc(a, (d.array() * (1 - y.array().square())).matrix());
    });
    return out;
  }

  Var sigmoid(Var a) {
    Mat y = value(a).unaryExpr([](T x) {
      if (x >= 0) return T(1) / (T(1) + std::exp(-x));
      const T e = std::exp(x);
      return e / (T(1) + e);
    });
    Var out = push("sigmoid", std::move(y), nullptr);
    set_backward(out, [a, out](Graph& g, const Mat& d) {
      const Mat& y = g.value(out);
      g.acc(a, (d.array() * y.array() * (1 - y.array())).matrix());
    });
    return out;
  }

  // ELU with alpha = 1.
  Var elu(Var a) {
    Mat y = value(a).unaryExpr([](T x) { return x >= 0 ? x : std::expm1(x); });
    Var out = push("elu", std::move(y), nullptr);
    set_backward(out, [a, out](Graph& g, const Mat& d) {
      const Mat& x = g.value(a);
      const Mat& y = g.value(out);
      Mat dx = d;
      for (Index i = 0; i < dx.size(); ++i)
        if (x.data()[i] < 0) dx.data()[i] *= y.data()[i] + T(1);
      g.acc(a, dx);
    });
    return out;
  }

  // Softmax of a column vector.
  Var softmax(Var a) {
    require_column("softmax", a);
    Mat y = softmax_values(value(a));
    Var out = push("softmax", std::move(y), nullptr);
    set_backward(out, [a, out](Graph& g, const Mat& d) {
      const Mat& y = g.value(out);
      const T dot = (d.array() * y.array()).sum();
      g.acc(a, (y.array() * (d.array() - dot)).matrix());
    });
    return out;
  }

  Var log_softmax(Var a) {
    require_column("log_softmax", a);
    Mat y = log_softmax_values(value(a));
    Var out = push("log_softmax", std::move(y), nullptr);
    set_backward(out, [a, out](Graph& g, const Mat& d) {
      const Mat p = g.value(out).array().exp();
      g.acc(a, d - p * d.sum());
    });
    return out;
  }

  // Columns `ids` of a (dim x vocab) table.
  Var gather_cols(Var table, std::span<const int> ids) {
    Mat out(rows(table), static_cast<Index>(ids.size()));
    for (std::size_t k = 0; k < ids.size(); ++k) {
      if (ids[k] < 0 || ids[k] >= cols(table)) throw UsageError("gather_cols id out of range");
      out.col(static_cast<Index>(k)) = value(table).col(ids[k]);
    }
    std::vector<int> idv(ids.begin(), ids.end());
    return push("gather_cols", std::move(out), [table, idv](Graph& g, const Mat& d) {
      Mat full = Mat::Zero(g.rows(table), g.cols(table));
      for (std::size_t k = 0; k < idv.size(); ++k) full.col(idv[k]) += d.col(static_cast<Index>(k));
      g.acc(table, full);
    });
  }

  // Elementwise product with a constant mask (inverted dropout when the mask
  // holds 0 and 1/(1-rate)).
  Var dropout_mask_apply(Var a, Mat mask) {
    if (mask.rows() != rows(a) || mask.cols() != cols(a)) throw UsageError("dropout mask shape mismatch");
    Mat y = value(a).cwiseProduct(mask);
    return push("dropout", std::move(y), [a, m = std::move(mask)](Graph& g, const Mat& d) {
      g.acc(a, d.cwiseProduct(m));
    });
  }

  // Row-wise maximum over columns: (r x c) -> (r x 1). Ties route the gradient
  // to the first maximal column.
  Var max_over_cols(Var a) {
    const Mat& x = value(a);
    if (x.cols() == 0) throw UsageError("max_over_cols of empty matrix");
    Mat out(x.rows(), 1);
    std::vector<Index> arg(static_cast<std::size_t>(x.rows()));
    for (Index r = 0; r < x.rows(); ++r) {
      Index best = 0;
      for (Index c = 1; c < x.cols(); ++c)
        if (x(r, c) > x(r, best)) best = c;
      arg[static_cast<std::size_t>(r)] = best;
      out(r, 0) = x(r, best);
    }
    return push("max_over_cols", std::move(out), [a, arg](Graph& g, const Mat& d) {
      Mat full = Mat::Zero(g.rows(a), g.cols(a));
      for (Index r = 0; r < full.rows(); ++r) full(r, arg[static_cast<std::size_t>(r)]) = d(r, 0);
      g.acc(a, full);
    });
  }

  // im2col for a 1-D convolution: (d x L) -> (window*d x L-window+1), column j
  // stacking input columns j..j+window-1.
  Var unfold_cols(Var a, Index window) {
    const Mat& x = value(a);
    const Index d = x.rows(), positions = x.cols() - window + 1;
    if (window < 1 || positions < 1) throw UsageError("unfold_cols: input shorter than window");
    Mat out(window * d, positions);
    for (Index j = 0; j < positions; ++j)
      for (Index w = 0; w < window; ++w) out.block(w * d, j, d, 1) = x.col(j + w);
    return push("unfold_cols", std::move(out), [a, window](Graph& g, const Mat& dy) {
      const Index d = g.rows(a);
      Mat full = Mat::Zero(d, g.cols(a));
      for (Index j = 0; j < dy.cols(); ++j)
        for (Index w = 0; w < window; ++w) full.col(j + w) += dy.block(w * d, j, d, 1);
      g.acc(a, full);
    });
  }

  Var sum(Var a) {
    Mat out = Mat::Constant(1, 1, value(a).sum());
    return push("sum", std::move(out), [a](Graph& g, const Mat& d) {
      g.acc(a, Mat::Constant(g.rows(a), g.cols(a), d(0, 0)));
    });
  }

  // Element `i` of a column vector as 1x1.
  Var pick(Var a, Index i) {
    require_column("pick", a);
    if (i < 0 || i >= rows(a)) throw UsageError("pick index out of range");
    return push("pick", Mat::Constant(1, 1, value(a)(i, 0)), [a, i](Graph& g, const Mat& d) {
      Mat full = Mat::Zero(g.rows(a), 1);
      full(i, 0) = d(0, 0);
      g.acc(a, full);
    });
  }

  // -log softmax(scores restricted to legal entries)[target]. `legal[j] != 0`
  // marks entries that take part in the normalization; the rest get exactly zero
  // probability.
  Var masked_nll(Var scores, std::span<const std::uint8_t> legal, Index target) {
    require_column("masked_nll", scores);
    if (static_cast<Index>(legal.size()) != rows(scores)) throw UsageError("masked_nll mask size mismatch");
    if (target < 0 || target >= rows(scores) || !legal[static_cast<std::size_t>(target)])
      throw UsageError("masked_nll target is masked out");
    Mat p = masked_softmax_values(value(scores), legal);
    const T nll = -std::log(p(target, 0));
    return push("masked_nll", Mat::Constant(1, 1, nll), [scores, target, p = std::move(p)](Graph& g, const Mat& d) {
      Mat grad = p;
      grad(target, 0) -= T(1);
      g.acc(scores, grad * d(0, 0));
    });
  }

  // Accumulates d(loss)/d(param) into `grads` for every parameter leaf. `loss`
  // must be 1x1.
  void backward(Var loss, Gradients<T>& grads) {
    if (rows(loss) != 1 || cols(loss) != 1) throw UsageError("backward needs a scalar loss");
    if (grads.size() != params_->size()) grads.reset(*params_);
    grads_.assign(nodes_.size(), Mat());
    grads_[loss.id] = Mat::Ones(1, 1);
    for (std::int64_t i = loss.id; i >= 0; --i) {
      auto& node = nodes_[static_cast<std::size_t>(i)];
      Mat& d = grads_[static_cast<std::size_t>(i)];
      if (d.size() == 0) continue;
      if (node.param >= 0)
        grads.accumulate(ParamId{static_cast<std::uint32_t>(node.param)}, d);
      else if (node.backward)
        node.backward(*this, d);
      d.resize(0, 0);
    }
  }

  static Mat softmax_values(const Mat& x) {
    Mat e = (x.array() - x.maxCoeff()).exp();
    return e / e.sum();
  }

  static Mat log_softmax_values(const Mat& x) {
    const T m = x.maxCoeff();
    const T lse = m + std::log((x.array() - m).exp().sum());
    return x.array() - lse;
  }

  static Mat masked_softmax_values(const Mat& x, std::span<const std::uint8_t> legal) {
    T m = -std::numeric_limits<T>::infinity();
    for (Index j = 0; j < x.rows(); ++j)
      if (legal[static_cast<std::size_t>(j)]) m = std::max(m, x(j, 0));
    if (!std::isfinite(m)) throw NumericError("masked softmax over an empty support");
    Mat p = Mat::Zero(x.rows(), 1);
    T z = 0;
    for (Index j = 0; j < x.rows(); ++j)
      if (legal[static_cast<std::size_t>(j)]) z += (p(j, 0) = std::exp(x(j, 0) - m));
    return p / z;
  }

  // Log-probabilities over legal entries; masked entries are -infinity.
  static Mat masked_log_softmax_values(const Mat& x, std::span<const std::uint8_t> legal) {
    T m = -std::numeric_limits<T>::infinity();
    for (Index j = 0; j < x.rows(); ++j)
      if (legal[static_cast<std::size_t>(j)]) m = std::max(m, x(j, 0));
    if (!std::isfinite(m)) throw NumericError("masked softmax over an empty support");
    T z = 0;
    for (Index j = 0; j < x.rows(); ++j)
      if (legal[static_cast<std::size_t>(j)]) z += std::exp(x(j, 0) - m);
    const T lse = m + std::log(z);
    Mat out(x.rows(), 1);
    for (Index j = 0; j < x.rows(); ++j)
      out(j, 0) = legal[static_cast<std::size_t>(j)] ? x(j, 0) - lse : -std::numeric_limits<T>::infinity();
    return out;
  }

 private:
  struct Node {
    Mat value;
    BackwardFn backward;
    int param = -1;
  };

  Var push(const char* op, Mat value, BackwardFn fn) {
    if (!value.allFinite()) throw NumericError(std::string("non-finite value produced by ") + op);
    nodes_.push_back(Node{std::move(value), std::move(fn), -1});
    return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
  }

  void set_backward(Var v, BackwardFn fn) { nodes_[v.id].backward = std::move(fn); }

  void acc(Var v, const Mat& d) {
    Mat& g = grads_[v.id];
    if (g.size() == 0)
      g = d;
    else
      g += d;
  }

  void same_shape(const char* op, Var a, Var b) const {
    if (rows(a) != rows(b) || cols(a) != cols(b)) shape_error(op, a, b);
  }

  void require_column(const char* op, Var a) const {
    if (cols(a) != 1) throw UsageError(std::string(op) + " expects a column vector");
  }

  [[noreturn]] void shape_error(const char* op, Var a, Var b) const {
    throw UsageError(std::string("shape mismatch in ") + op + ": " + std::to_string(rows(a)) + "x" +
                     std::to_string(cols(a)) + " vs " + std::to_string(rows(b)) + "x" + std::to_string(cols(b)));
  }

  const ParameterSet<T>* params_;
  std::vector<Var> param_leaf_;
  std::vector<Node> nodes_;
  std::vector<Mat> grads_;
};

// Inverted-dropout mask: entries are 0 with probability `rate`, else 1/(1-rate).
template <class T, class Rng>
Matrix<T> dropout_mask(Index rows, Index cols, double rate, Rng& rng) {
  Matrix<T> m(rows, cols);
  if (rate <= 0.0) return m.setOnes();
  std::bernoulli_distribution keep(1.0 - rate);
  const T scale = static_cast<T>(1.0 / (1.0 - rate));
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = keep(rng) ? scale : T(0);
  return m;
}

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t coordinates = 0;
  std::string worst;  // "param[index]" of the worst coordinate
};

// Compares backward() against central differences at about `samples` randomly
// drawn parameter coordinates, spread evenly over the tensors. `loss` maps a
// fresh graph to a scalar node and must be deterministic; functions with
// discontinuities at the evaluation point (argmax decisions) are unsupported.
template <class F>
GradCheckResult grad_check(F&& loss, ParameterSet<double>& params, double eps = 1e-5,
                           std::size_t samples = 200, std::uint64_t seed = 7) {
  Gradients<double> grads(params);
  {
    Graph<double> g(params);
    Var l = loss(g);
    g.backward(l, grads);
  }
  // Stratified: every tensor contributes roughly samples / #tensors coordinates.
  std::vector<std::pair<std::size_t, Index>> coords;
  std::mt19937_64 rng(seed);
  const std::size_t per = std::max<std::size_t>(1, samples / std::max<std::size_t>(1, params.size()));
  for (std::size_t p = 0; p < params.size(); ++p) {
    std::vector<Index> idx(static_cast<std::size_t>(params.at(p).value.size()));
    std::iota(idx.begin(), idx.end(), Index{0});
    std::shuffle(idx.begin(), idx.end(), rng);
    if (idx.size() > per) idx.resize(per);
    for (Index i : idx) coords.emplace_back(p, i);
  }
  auto eval = [&] {
    Graph<double> g(params);
    return g.scalar(loss(g));
  };
  GradCheckResult result;
  result.coordinates = coords.size();
  for (auto [p, i] : coords) {
    double& x = params.at(p).value.data()[i];
    const double saved = x;
    x = saved + eps;
    const double up = eval();
    x = saved - eps;
    const double down = eval();
    x = saved;
    const double numeric = (up - down) / (2 * eps);
    const ParamId id{static_cast<std::uint32_t>(p)};
    const double analytic = grads.touched(id) ? grads.raw(id).data()[i] : 0.0;
    const double err =
        std::abs(analytic - numeric) / std::max({1.0, std::abs(analytic), std::abs(numeric)});
    if (err >= result.max_rel_error) {
      result.max_rel_error = err;
      result.worst = params.at(p).name + "[" + std::to_string(i) + "]";
    }
  }
  return result;
}

}  // namespace hptr::ad
