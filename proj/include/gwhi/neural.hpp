// include/gwhi/neural.hpp

// Copyright 2026 gwhi authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.
//
// Minimal dense-network engine shared by both HI models: layers with
// leaky-ReLU / sigmoid / linear activations, reverse-mode gradients, Glorot
// initialization, Adam, and the trace-minus-log-determinant Gram kernel used
// by the diversity loss. Everything is 64-bit and deterministic given a seed.

#ifndef GWHI_NEURAL_HPP
#define GWHI_NEURAL_HPP

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "gwhi/common.hpp"
#include "gwhi/rng.hpp"

namespace gwhi {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class Activation { LeakyRelu, Sigmoid, Linear };

inline const char* activation_name(Activation a) {
  switch (a) {
    case Activation::LeakyRelu: return "leaky_relu";
    case Activation::Sigmoid: return "sigmoid";
    case Activation::Linear: return "linear";
  }
  return "?";
}

inline Activation activation_from_name(const std::string& s) {
  if (s == "leaky_relu") return Activation::LeakyRelu;
  if (s == "sigmoid") return Activation::Sigmoid;
  if (s == "linear") return Activation::Linear;
  throw ArgumentError("unknown activation '" + s + "'");
}

constexpr double kLeakySlope = 0.01;

inline Matrix activate(const Matrix& pre, Activation act) {
  switch (act) {
    case Activation::LeakyRelu:
      return pre.unaryExpr([](double v) { return v > 0.0 ? v : kLeakySlope * v; });
    case Activation::Sigmoid:
      return pre.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
    case Activation::Linear:
      return pre;
  }
  return pre;
}

/// Derivative as a function of (pre-activation, activation output).
inline Matrix activate_grad(const Matrix& pre, const Matrix& post, Activation act) {
  switch (act) {
    case Activation::LeakyRelu:
      return pre.unaryExpr([](double v) { return v > 0.0 ? 1.0 : kLeakySlope; });
    case Activation::Sigmoid:
      return (post.array() * (1.0 - post.array())).matrix();
    case Activation::Linear:
      return Matrix::Ones(pre.rows(), pre.cols());
  }
  return Matrix::Ones(pre.rows(), pre.cols());
}

/// Entries uniform in +-sqrt(6 / (rows + cols)), filled column-major so the
/// draw order (and thus the matrix) is reproducible.
inline Matrix glorot_uniform(int rows, int cols, Rng& rng) {
  if (rows <= 0 || cols <= 0) throw ArgumentError("glorot_uniform: dimensions must be positive");
  const double bound = std::sqrt(6.0 / (static_cast<double>(rows) + cols));
  Matrix m(rows, cols);
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) m(r, c) = rng.uniform(-bound, bound);
  return m;
}

// ---------------------------------------------------------------------------
// Dense network
// ---------------------------------------------------------------------------

struct DenseLayer {
  Matrix W;  // out x in
  Vector b;  // out; zero-sized when the layer is bias-free
  Activation act = Activation::Linear;

  bool has_bias() const { return b.size() > 0; }
  int in_width() const { return static_cast<int>(W.cols()); }
  int out_width() const { return static_cast<int>(W.rows()); }
};

inline DenseLayer make_layer(int in, int out, Activation act, Rng& rng, bool bias = true) {
  DenseLayer l;
  l.W = glorot_uniform(out, in, rng);
  l.b = bias ? Vector::Zero(out) : Vector();
  l.act = act;
  return l;
}

struct DenseNet {
  std::vector<DenseLayer> layers;

  int input_width() const { return layers.front().in_width(); }
  int output_width() const { return layers.back().out_width(); }

  void validate() const {
    if (layers.empty()) throw ArgumentError("network has no layers");
    for (size_t i = 1; i < layers.size(); ++i)
      if (layers[i].in_width() != layers[i - 1].out_width())
        throw ArgumentError("adjacent layer dimensions disagree");
    for (const auto& l : layers)
      if (!l.W.allFinite() || (l.has_bias() && !l.b.allFinite()))
        throw ArgumentError("network weights contain non-finite values");
  }
};

/// Activations of every layer for one batch; columns are samples.
struct ForwardCache {
  Matrix input;
  std::vector<Matrix> pre;   // per layer
  std::vector<Matrix> post;  // per layer

  const Matrix& output() const { return post.back(); }
};

inline ForwardCache forward(const DenseNet& net, const Matrix& batch) {
  if (batch.rows() != net.input_width())
    throw ArgumentError("batch width " + std::to_string(batch.rows()) +
                        " does not match network input " + std::to_string(net.input_width()));
  ForwardCache cache;
  cache.input = batch;
  const Matrix* x = &cache.input;
  for (const auto& l : net.layers) {
    Matrix pre = l.W * (*x);
    if (l.has_bias()) pre.colwise() += l.b;
    cache.post.push_back(activate(pre, l.act));
    cache.pre.push_back(std::move(pre));
    x = &cache.post.back();
  }
  return cache;
}

struct LayerGrads {
  Matrix dW;
  Vector db;
};

struct NetGrads {
  std::vector<LayerGrads> layers;
  Matrix d_input;

  void add_scaled(const NetGrads& other, double scale) {
    for (size_t i = 0; i < layers.size(); ++i) {
      layers[i].dW += scale * other.layers[i].dW;
      if (layers[i].db.size()) layers[i].db += scale * other.layers[i].db;
    }
  }
};

inline NetGrads zero_grads(const DenseNet& net) {
  NetGrads g;
  for (const auto& l : net.layers)
    g.layers.push_back({Matrix::Zero(l.W.rows(), l.W.cols()),
                        l.has_bias() ? Vector::Zero(l.b.size()) : Vector()});
  return g;
}

/// Reverse pass from dL/d(output); returns parameter gradients and dL/d(input).
inline NetGrads backward(const DenseNet& net, const ForwardCache& cache, Matrix upstream) {
  NetGrads g;
  g.layers.resize(net.layers.size());
  for (int li = static_cast<int>(net.layers.size()) - 1; li >= 0; --li) {
    const auto& l = net.layers[static_cast<size_t>(li)];
    const Matrix& pre = cache.pre[static_cast<size_t>(li)];
    const Matrix& post = cache.post[static_cast<size_t>(li)];
    Matrix d_pre = upstream.cwiseProduct(activate_grad(pre, post, l.act));
    const Matrix& below = li == 0 ? cache.input : cache.post[static_cast<size_t>(li - 1)];
    g.layers[static_cast<size_t>(li)].dW = d_pre * below.transpose();
    if (l.has_bias()) g.layers[static_cast<size_t>(li)].db = d_pre.rowwise().sum();
    upstream = l.W.transpose() * d_pre;
  }
  g.d_input = std::move(upstream);
  return g;
}

// ---------------------------------------------------------------------------
// Adam
// ---------------------------------------------------------------------------

struct AdamParams {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  std::vector<Matrix> mW, vW;
  std::vector<Vector> mb, vb;
  long step_count = 0;

  static AdamState init(const std::vector<DenseLayer>& layers) {
    AdamState s;
    for (const auto& l : layers) {
      s.mW.push_back(Matrix::Zero(l.W.rows(), l.W.cols()));
      s.vW.push_back(Matrix::Zero(l.W.rows(), l.W.cols()));
      s.mb.push_back(Vector::Zero(l.b.size()));
      s.vb.push_back(Vector::Zero(l.b.size()));
    }
    return s;
  }

  static AdamState init(const DenseNet& net) { return init(net.layers); }
};

namespace detail {

template <typename T>
void adam_update(T& param, const T& grad, T& m, T& v, const AdamParams& p, double bc1, double bc2) {
  m = p.beta1 * m + (1.0 - p.beta1) * grad;
  v = p.beta2 * v + (1.0 - p.beta2) * grad.cwiseProduct(grad);
  param.array() -= p.lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + p.eps);
}

}  // namespace detail

inline void adam_step(std::vector<DenseLayer>& layers, const std::vector<LayerGrads>& grads,
                      AdamState& state, const AdamParams& params) {
  ++state.step_count;
  const double bc1 = 1.0 - std::pow(params.beta1, static_cast<double>(state.step_count));
  const double bc2 = 1.0 - std::pow(params.beta2, static_cast<double>(state.step_count));
  for (size_t i = 0; i < layers.size(); ++i) {
    detail::adam_update(layers[i].W, grads[i].dW, state.mW[i], state.vW[i], params, bc1, bc2);
    if (layers[i].has_bias())
      detail::adam_update(layers[i].b, grads[i].db, state.mb[i], state.vb[i], params, bc1, bc2);
  }
}

inline void adam_step(DenseNet& net, const NetGrads& grads, AdamState& state,
                      const AdamParams& params) {
  adam_step(net.layers, grads.layers, state, params);
}

// ---------------------------------------------------------------------------
// Gram trace - log-det kernel (diversity loss)
// ---------------------------------------------------------------------------

struct GramTraceLogdet {
  double value = 0.0;
  Matrix grad;  // same shape as Z
};

/// value = trace(G) - logdet(G) with G = Z^T Z + ridge I (rows of Z are
/// samples); equals the sum of (zeta - ln zeta) over eigenvalues of the
/// ridged Gram matrix. grad = 2 Z - 2 Z G^{-1}, via Cholesky.
inline GramTraceLogdet gram_trace_logdet(const Matrix& Z, double ridge) {
  if (Z.rows() < 1 || Z.cols() < 1) throw ArgumentError("gram_trace_logdet: empty matrix");
  if (!Z.allFinite()) throw ArgumentError("gram_trace_logdet: non-finite input");
  if (ridge <= 0.0) throw ArgumentError("gram_trace_logdet: ridge must be positive");
  const Eigen::Index h = Z.cols();
  Matrix G = Z.transpose() * Z + ridge * Matrix::Identity(h, h);
  Eigen::LLT<Matrix> llt(G);
  if (llt.info() != Eigen::Success)
    throw ArgumentError("gram_trace_logdet: Gram matrix not positive definite");
  double logdet = 0.0;
  for (Eigen::Index i = 0; i < h; ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i));
  GramTraceLogdet out;
  out.value = G.trace() - logdet;
  out.grad = 2.0 * Z - 2.0 * llt.solve(Z.transpose()).transpose();
  return out;
}

}  // namespace gwhi

#endif  // GWHI_NEURAL_HPP
