#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "antplan/error.hpp"
#include "antplan/rng.hpp"
#include "antplan/scene_graph.hpp"

namespace antplan {

struct RegressorShape {
  int layers = 4;
  int hidden = 64;
  int features = 40;

  /// Trainable parameter count: per layer four projections (q, k, v, skip)
  /// with biases plus normalization scale and shift, then a 2d+1 readout.
  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (int l = 0; l < layers; ++l) {
      const std::size_t in = l == 0 ? features : hidden;
      n += 4 * (in * hidden + hidden) + 2 * hidden;
    }
    return n + 2 * static_cast<std::size_t>(hidden) + 1;
  }
  friend bool operator==(const RegressorShape&, const RegressorShape&) = default;
};

/// Graph in canonical node order with incoming-edge lists (CSR by destination).
template <typename Scalar>
struct CanonicalGraph {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> x;
  std::vector<int> in_offset;  ///< size n + 1
  std::vector<int> in_source;

  int node_count() const { return static_cast<int>(x.rows()); }
};

/// Orders nodes by stable color refinement over exact feature values, and each
/// incoming list by source color. Nodes sharing a stable color compute
/// bit-identical values, so the result of any order-dependent sum is the same
/// for every relabeling of the input graph.
template <typename Scalar>
CanonicalGraph<Scalar> canonicalize(const SceneGraph& g) {
  const int n = g.node_count();
  const int f = static_cast<int>(g.features.cols());
  std::vector<std::vector<int>> incoming(n);
  for (auto [src, dst] : g.edges) {
    if (src < 0 || dst < 0 || src >= n || dst >= n)
      throw Error(ErrorKind::ShapeMismatch, "edge endpoint outside the node range");
    incoming[dst].push_back(src);
  }

  std::vector<int> color(n, 0);
  {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    auto row_less = [&](int a, int b) {
      for (int j = 0; j < f; ++j)
        if (g.features(a, j) != g.features(b, j)) return g.features(a, j) < g.features(b, j);
      return false;
    };
    std::stable_sort(order.begin(), order.end(), row_less);
    for (int i = 1; i < n; ++i) color[order[i]] = color[order[i - 1]] + (row_less(order[i - 1], order[i]) ? 1 : 0);
  }
  int classes = n ? *std::max_element(color.begin(), color.end()) + 1 : 0;
  for (int round = 0; round < n; ++round) {
    std::map<std::vector<int>, int> signatures;
    std::vector<std::vector<int>> sig(n);
    for (int i = 0; i < n; ++i) {
      sig[i].push_back(color[i]);
      std::vector<int> nb;
      for (int s : incoming[i]) nb.push_back(color[s]);
      std::sort(nb.begin(), nb.end());
      sig[i].insert(sig[i].end(), nb.begin(), nb.end());
      signatures.emplace(sig[i], 0);
    }
    int next = 0;
    for (auto& [key, value] : signatures) value = next++;
    for (int i = 0; i < n; ++i) color[i] = signatures[sig[i]];
    if (next == classes) break;
    classes = next;
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return color[a] < color[b]; });
  std::vector<int> position(n);
  for (int i = 0; i < n; ++i) position[order[i]] = i;

  CanonicalGraph<Scalar> out;
  out.x.resize(n, f);
  out.in_offset.assign(1, 0);
  for (int i = 0; i < n; ++i) {
    const int v = order[i];
    out.x.row(i) = g.features.row(v).template cast<Scalar>();
    std::vector<int> sources;
    for (int s : incoming[v]) sources.push_back(position[s]);
    std::sort(sources.begin(), sources.end(), [&](int a, int b) {
      return color[order[a]] != color[order[b]] ? color[order[a]] < color[order[b]] : a < b;
    });
    out.in_source.insert(out.in_source.end(), sources.begin(), sources.end());
    out.in_offset.push_back(static_cast<int>(out.in_source.size()));
  }
  return out;
}

/// Attention message passing regressor. Each layer computes, per node i,
///   z_i = Σ_{j→i} softmax_j(q_i·k_j / √d) v_j + skip_i,
/// followed by batch normalization and a leaky ReLU. The readout is an affine
/// map of the concatenated node mean and node sum.
template <typename Scalar>
class GraphRegressor {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;
  using MatrixMap = Eigen::Map<Matrix>;
  using ConstMatrixMap = Eigen::Map<const Matrix>;

  static constexpr Scalar kLeak = Scalar(0.01);
  static constexpr Scalar kEpsilon = Scalar(1e-5);
  static constexpr Scalar kMomentum = Scalar(0.1);

  GraphRegressor() = default;
  explicit GraphRegressor(RegressorShape shape)
      : shape_(shape), theta_(Vector::Zero(static_cast<Eigen::Index>(shape.parameter_count()))) {
    if (shape.layers < 1 || shape.hidden < 1 || shape.features < 1)
      throw Error(ErrorKind::ShapeMismatch, "layers, hidden and features must be positive");
    for (int l = 0; l < shape.layers; ++l) {
      running_mean_.push_back(RowVector::Zero(shape.hidden));
      running_var_.push_back(RowVector::Ones(shape.hidden));
      gamma(theta_, l).setOnes();
    }
  }

  /// Uniform(±1/√fan_in) weights, zero biases, unit scale, readout bias `bias`.
  void initialize(std::uint64_t seed, Scalar bias) {
    Rng rng(seed);
    auto fill = [&rng](auto block, int fan_in) {
      const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
      for (Eigen::Index j = 0; j < block.cols(); ++j)
        for (Eigen::Index i = 0; i < block.rows(); ++i) block(i, j) = Scalar((2.0 * rng.uniform() - 1.0) * bound);
    };
    theta_.setZero();
    for (int l = 0; l < shape_.layers; ++l) {
      for (int p = 0; p < 4; ++p) fill(weight(theta_, l, p), in_width(l));
      gamma(theta_, l).setOnes();
      running_mean_[l].setZero();
      running_var_[l].setOnes();
    }
    fill(readout_weight(theta_), 2 * shape_.hidden);
    theta_[theta_.size() - 1] = bias;
  }

  const RegressorShape& shape() const { return shape_; }
  Vector& parameters() { return theta_; }
  const Vector& parameters() const { return theta_; }
  std::vector<RowVector>& running_mean() { return running_mean_; }
  std::vector<RowVector>& running_var() { return running_var_; }
  const std::vector<RowVector>& running_mean() const { return running_mean_; }
  const std::vector<RowVector>& running_var() const { return running_var_; }

  /// Inference with running normalization statistics. Throws shape-mismatch.
  Scalar predict(const CanonicalGraph<Scalar>& g) const {
    check(g);
    Batch batch = make_batch({&g});
    Cache cache;
    return forward(batch, false, cache)[0];
  }
  Scalar predict(const SceneGraph& g) const { return predict(canonicalize<Scalar>(g)); }

  /// Training-mode forward (batch statistics) returning one output per graph.
  /// When `update_running` is set the running statistics move toward the batch ones.
  std::vector<Scalar> forward_train(const std::vector<const CanonicalGraph<Scalar>*>& graphs,
                                    bool update_running = false) {
    for (const auto* g : graphs) check(*g);
    Batch batch = make_batch(graphs);
    Cache cache;
    auto out = forward(batch, true, cache);
    if (update_running) absorb(cache, batch);
    return out;
  }

  /// Training-mode forward plus gradient of Σ_g d_output[g]·output[g] with
  /// respect to the parameter vector. Returns the outputs.
  std::vector<Scalar> gradient(const std::vector<const CanonicalGraph<Scalar>*>& graphs,
                               const std::function<std::vector<Scalar>(const std::vector<Scalar>&)>& d_output,
                               Vector& grad, bool update_running = false) {
    for (const auto* g : graphs) check(*g);
    Batch batch = make_batch(graphs);
    Cache cache;
    const auto out = forward(batch, true, cache);
    backward(batch, cache, d_output(out), grad);
    if (update_running) absorb(cache, batch);
    return out;
  }

 private:
  struct Batch {
    Matrix x;
    std::vector<int> in_offset, in_source, graph_offset;
  };
  struct LayerCache {
    Matrix h_in, q, k, v, xhat, y;
    std::vector<Scalar> alpha;
    RowVector mean, var, inv_std;
  };
  struct Cache {
    std::vector<LayerCache> layers;
    Matrix h_out;
    Matrix pooled;  // graphs × 2d
  };

  int in_width(int l) const { return l == 0 ? shape_.features : shape_.hidden; }
  std::size_t layer_offset(int l) const {
    std::size_t off = 0;
    for (int i = 0; i < l; ++i) off += 4 * (static_cast<std::size_t>(in_width(i)) * shape_.hidden + shape_.hidden) + 2 * shape_.hidden;
    return off;
  }
  // p: 0 q, 1 k, 2 v, 3 skip
  template <typename V>
  auto weight(V& t, int l, int p) const {
    const std::size_t block = static_cast<std::size_t>(in_width(l)) * shape_.hidden + shape_.hidden;
    return Eigen::Map<std::conditional_t<std::is_const_v<V>, const Matrix, Matrix>>(
        t.data() + layer_offset(l) + p * block, in_width(l), shape_.hidden);
  }
  template <typename V>
  auto bias(V& t, int l, int p) const {
    const std::size_t block = static_cast<std::size_t>(in_width(l)) * shape_.hidden + shape_.hidden;
    return Eigen::Map<std::conditional_t<std::is_const_v<V>, const RowVector, RowVector>>(
        t.data() + layer_offset(l) + p * block + static_cast<std::size_t>(in_width(l)) * shape_.hidden,
        shape_.hidden);
  }
  template <typename V>
  auto gamma(V& t, int l) const {
    const std::size_t block = static_cast<std::size_t>(in_width(l)) * shape_.hidden + shape_.hidden;
    return Eigen::Map<std::conditional_t<std::is_const_v<V>, const RowVector, RowVector>>(
        t.data() + layer_offset(l) + 4 * block, shape_.hidden);
  }
  template <typename V>
  auto beta(V& t, int l) const {
    const std::size_t block = static_cast<std::size_t>(in_width(l)) * shape_.hidden + shape_.hidden;
    return Eigen::Map<std::conditional_t<std::is_const_v<V>, const RowVector, RowVector>>(
        t.data() + layer_offset(l) + 4 * block + shape_.hidden, shape_.hidden);
  }
  template <typename V>
  auto readout_weight(V& t) const {
    return Eigen::Map<std::conditional_t<std::is_const_v<V>, const RowVector, RowVector>>(
        t.data() + layer_offset(shape_.layers), 2 * shape_.hidden);
  }

  void check(const CanonicalGraph<Scalar>& g) const {
    if (g.x.cols() != shape_.features)
      throw Error(ErrorKind::ShapeMismatch, "graph has " + std::to_string(g.x.cols()) +
                                                " features per node, model expects " +
                                                std::to_string(shape_.features));
    if (g.node_count() == 0) throw Error(ErrorKind::ShapeMismatch, "graph has no nodes");
  }

  static Batch make_batch(const std::vector<const CanonicalGraph<Scalar>*>& graphs) {
    Batch b;
    int rows = 0;
    for (const auto* g : graphs) rows += g->node_count();
    b.x.resize(rows, graphs.empty() ? 0 : graphs[0]->x.cols());
    b.in_offset.assign(1, 0);
    b.graph_offset.assign(1, 0);
    int base = 0;
    for (const auto* g : graphs) {
      b.x.middleRows(base, g->node_count()) = g->x;
      for (int i = 0; i < g->node_count(); ++i) {
        for (int e = g->in_offset[i]; e < g->in_offset[i + 1]; ++e) b.in_source.push_back(base + g->in_source[e]);
        b.in_offset.push_back(static_cast<int>(b.in_source.size()));
      }
      base += g->node_count();
      b.graph_offset.push_back(base);
    }
    return b;
  }

  // Inference projects row by row so that every node takes the same arithmetic path.
  Matrix project(const Matrix& h, int l, int p, bool batched) const {
    const auto w = weight(theta_, l, p);
    const auto b = bias(theta_, l, p);
    if (batched) return (h * w).rowwise() + b;
    Matrix out(h.rows(), w.cols());
    for (Eigen::Index i = 0; i < h.rows(); ++i) out.row(i).noalias() = h.row(i) * w + b;
    return out;
  }

  std::vector<Scalar> forward(const Batch& b, bool training, Cache& cache) const {
    const int n = static_cast<int>(b.x.rows());
    const int d = shape_.hidden;
    const Scalar scale = Scalar(1) / std::sqrt(Scalar(d));
    Matrix h = b.x;
    cache.layers.resize(shape_.layers);
    for (int l = 0; l < shape_.layers; ++l) {
      LayerCache& c = cache.layers[l];
      c.h_in = h;
      c.q = project(h, l, 0, training);
      c.k = project(h, l, 1, training);
      c.v = project(h, l, 2, training);
      Matrix z = project(h, l, 3, training);
      c.alpha.assign(b.in_source.size(), Scalar(0));
      for (int i = 0; i < n; ++i) {
        const int e0 = b.in_offset[i], e1 = b.in_offset[i + 1];
        if (e0 == e1) continue;
        Scalar top = -std::numeric_limits<Scalar>::infinity();
        for (int e = e0; e < e1; ++e) {
          c.alpha[e] = c.q.row(i).dot(c.k.row(b.in_source[e])) * scale;
          top = std::max(top, c.alpha[e]);
        }
        Scalar total = 0;
        for (int e = e0; e < e1; ++e) total += (c.alpha[e] = std::exp(c.alpha[e] - top));
        for (int e = e0; e < e1; ++e) {
          c.alpha[e] /= total;
          z.row(i) += c.alpha[e] * c.v.row(b.in_source[e]);
        }
      }
      if (training) {
        c.mean = z.colwise().sum() / Scalar(n);
        c.var = (z.rowwise() - c.mean).array().square().colwise().sum().matrix() / Scalar(n);
      } else {
        c.mean = running_mean_[l];
        c.var = running_var_[l];
      }
      c.inv_std = (c.var.array() + kEpsilon).rsqrt().matrix();
      c.xhat = ((z.rowwise() - c.mean).array().rowwise() * c.inv_std.array()).matrix();
      c.y = ((c.xhat.array().rowwise() * gamma(theta_, l).array()).rowwise() + beta(theta_, l).array()).matrix();
      h = c.y.unaryExpr([](Scalar v) { return v > 0 ? v : kLeak * v; });
    }
    cache.h_out = h;
    const int graphs = static_cast<int>(b.graph_offset.size()) - 1;
    cache.pooled.resize(graphs, 2 * d);
    std::vector<Scalar> out(graphs);
    const auto w = readout_weight(theta_);
    for (int g = 0; g < graphs; ++g) {
      const int g0 = b.graph_offset[g], count = b.graph_offset[g + 1] - g0;
      const RowVector sum = h.middleRows(g0, count).colwise().sum();
      cache.pooled.row(g).head(d) = sum / Scalar(count);
      cache.pooled.row(g).tail(d) = sum;
      out[g] = cache.pooled.row(g).dot(w) + theta_[theta_.size() - 1];
    }
    return out;
  }

  void backward(const Batch& b, const Cache& cache, const std::vector<Scalar>& d_out, Vector& grad) const {
    const int n = static_cast<int>(b.x.rows());
    const int d = shape_.hidden;
    const Scalar scale = Scalar(1) / std::sqrt(Scalar(d));
    grad = Vector::Zero(theta_.size());
    const int graphs = static_cast<int>(d_out.size());
    const auto w = readout_weight(theta_);
    auto gw = readout_weight(grad);
    Matrix dh = Matrix::Zero(n, d);
    for (int g = 0; g < graphs; ++g) {
      gw += d_out[g] * cache.pooled.row(g);
      grad[grad.size() - 1] += d_out[g];
      const int g0 = b.graph_offset[g], count = b.graph_offset[g + 1] - g0;
      const RowVector row = d_out[g] * (w.head(d) / Scalar(count) + w.tail(d));
      dh.middleRows(g0, count).rowwise() = row;
    }
    for (int l = shape_.layers - 1; l >= 0; --l) {
      const LayerCache& c = cache.layers[l];
      const Matrix dy = (dh.array() * c.y.unaryExpr([](Scalar v) { return v > 0 ? Scalar(1) : kLeak; }).array()).matrix();
      gamma(grad, l) += (dy.array() * c.xhat.array()).colwise().sum().matrix();
      beta(grad, l) += dy.colwise().sum();
      const Matrix dxhat = (dy.array().rowwise() * gamma(theta_, l).array()).matrix();
      const RowVector sum_dxhat = dxhat.colwise().sum();
      const RowVector sum_dxhat_xhat = (dxhat.array() * c.xhat.array()).colwise().sum().matrix();
      const Matrix dz = (((dxhat * Scalar(n)).rowwise() - sum_dxhat).array() -
                         c.xhat.array().rowwise() * sum_dxhat_xhat.array())
                            .rowwise() *
                        (c.inv_std.array() / Scalar(n));
      Matrix dq = Matrix::Zero(n, d), dk = Matrix::Zero(n, d), dv = Matrix::Zero(n, d);
      for (int i = 0; i < n; ++i) {
        const int e0 = b.in_offset[i], e1 = b.in_offset[i + 1];
        if (e0 == e1) continue;
        Scalar weighted = 0;
        std::vector<Scalar> da(e1 - e0);
        for (int e = e0; e < e1; ++e) {
          const int s = b.in_source[e];
          da[e - e0] = dz.row(i).dot(c.v.row(s));
          dv.row(s) += c.alpha[e] * dz.row(i);
          weighted += c.alpha[e] * da[e - e0];
        }
        for (int e = e0; e < e1; ++e) {
          const int s = b.in_source[e];
          const Scalar ds = c.alpha[e] * (da[e - e0] - weighted) * scale;
          dq.row(i) += ds * c.k.row(s);
          dk.row(s) += ds * c.q.row(i);
        }
      }
      const Matrix* parts[4] = {&dq, &dk, &dv, &dz};
      Matrix dh_in = Matrix::Zero(n, in_width(l));
      for (int p = 0; p < 4; ++p) {
        weight(grad, l, p) += c.h_in.transpose() * *parts[p];
        bias(grad, l, p) += parts[p]->colwise().sum();
        if (l > 0) dh_in += *parts[p] * weight(theta_, l, p).transpose();
      }
      if (l > 0) {
        dh = std::move(dh_in);
      }
    }
  }

  void absorb(const Cache& cache, const Batch& b) {
    const Scalar n = Scalar(b.x.rows());
    const Scalar unbias = n > 1 ? n / (n - 1) : Scalar(1);
    for (int l = 0; l < shape_.layers; ++l) {
      running_mean_[l] = (Scalar(1) - kMomentum) * running_mean_[l] + kMomentum * cache.layers[l].mean;
      running_var_[l] = (Scalar(1) - kMomentum) * running_var_[l] + kMomentum * unbias * cache.layers[l].var;
    }
  }

  RegressorShape shape_;
  Vector theta_;
  std::vector<RowVector> running_mean_, running_var_;
};

}  // namespace antplan
