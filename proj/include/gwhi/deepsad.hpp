// include/gwhi/deepsad.hpp

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
// Diversity-DeepSAD with continuous auxiliary labels: autoencoder
// pretraining, hypersphere-center initialization, the three-term loss
// (distance/labels + L2 + Gram-diversity), and HI inference as the distance
// to the hypersphere center.

#ifndef GWHI_DEEPSAD_HPP
#define GWHI_DEEPSAD_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "gwhi/common.hpp"
#include "gwhi/neural.hpp"

namespace gwhi {

struct DeepSadHyperparams {
  // Searchable (Table 2 bounds); defaults are range midpoints.
  int batch_size = 100;          // [50, 150]
  double lr_pretrain = 0.00055;  // [1e-4, 1e-3]
  double lr = 0.00055;           // [1e-4, 1e-3]
  int epochs_pretrain = 12;      // [5, 20]
  int epochs = 125;              // [50, 200]
  // Fixed from the literature. nu is unusually large for an L2 weight; it is
  // kept as published but overridable through the run config.
  double nu = 10.0;
  double eta = 10.0;
  double lambda = 0.001;
  double eps = 1e-6;
  int embedding_dim = 16;
  int hidden_layers = 6;
};

// ---------------------------------------------------------------------------
// Auxiliary labels
// ---------------------------------------------------------------------------

/// Continuous labels 1 - 2 t/t_N on the first and last lifetime quarters;
/// the middle half carries no label.
struct AuxiliaryLabeling {
  std::vector<double> label;     // meaningful only where labeled[i] != 0
  std::vector<uint8_t> labeled;

  size_t size() const { return label.size(); }
};

inline AuxiliaryLabeling make_labels(std::span<const double> times) {
  if (times.empty()) throw ArgumentError("make_labels: empty time grid");
  for (size_t i = 1; i < times.size(); ++i)
    if (times[i] <= times[i - 1]) throw ArgumentError("make_labels: times must increase");
  const double t_end = times.back();
  if (t_end <= 0.0) throw ArgumentError("make_labels: end-of-life time must be positive");
  AuxiliaryLabeling out;
  out.label.resize(times.size(), 0.0);
  out.labeled.resize(times.size(), 0);
  for (size_t i = 0; i < times.size(); ++i) {
    const double frac = times[i] / t_end;
    if (frac <= 0.25 || frac >= 0.75) {
      out.label[i] = 1.0 - 2.0 * frac;
      out.labeled[i] = 1;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Network construction
// ---------------------------------------------------------------------------

/// Encoder: 6 hidden layers, widths halving from the input (floored at the
/// embedding width), leaky-ReLU between layers, bias-free linear final layer
/// onto the 16-d hyperspace.
inline DenseNet build_deepsad_encoder(int input_width, const DeepSadHyperparams& hp, Rng& rng) {
  if (input_width < 1) throw ArgumentError("encoder input width must be positive");
  DenseNet net;
  int in = input_width;
  for (int l = 1; l < hp.hidden_layers; ++l) {
    int out = std::max(input_width >> l, hp.embedding_dim);
    net.layers.push_back(make_layer(in, out, Activation::LeakyRelu, rng));
    in = out;
  }
  net.layers.push_back(make_layer(in, hp.embedding_dim, Activation::Linear, rng,
                                  /*bias=*/false));
  return net;
}

/// Mirror decoder for pretraining; inverts the encoder's widths.
inline DenseNet build_mirror_decoder(const DenseNet& encoder, Rng& rng) {
  DenseNet dec;
  for (int li = static_cast<int>(encoder.layers.size()) - 1; li >= 0; --li) {
    const auto& l = encoder.layers[static_cast<size_t>(li)];
    Activation act = li == 0 ? Activation::Linear : Activation::LeakyRelu;
    dec.layers.push_back(make_layer(l.out_width(), l.in_width(), act, rng));
  }
  return dec;
}

// ---------------------------------------------------------------------------
// Pretraining and center initialization
// ---------------------------------------------------------------------------

struct TrainLog {
  std::vector<double> epoch_loss;

  double initial() const { return epoch_loss.empty() ? 0.0 : epoch_loss.front(); }
  double final_loss() const { return epoch_loss.empty() ? 0.0 : epoch_loss.back(); }
};

namespace detail {

inline std::vector<std::vector<int>> shuffled_batches(int n, int batch_size, Rng& rng) {
  std::vector<int> idx(static_cast<size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  rng.shuffle(idx);
  std::vector<std::vector<int>> batches;
  for (int start = 0; start < n; start += batch_size) {
    int end = std::min(n, start + batch_size);
    batches.emplace_back(idx.begin() + start, idx.begin() + end);
  }
  return batches;
}

inline Matrix gather_cols(const Matrix& X, const std::vector<int>& cols) {
  Matrix out(X.rows(), static_cast<Eigen::Index>(cols.size()));
  for (size_t i = 0; i < cols.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = X.col(cols[i]);
  return out;
}

}  // namespace detail

/// Mean-squared reconstruction pretraining of encoder+decoder. The decoder
/// is discarded by the caller afterwards.
inline TrainLog pretrain_autoencoder(DenseNet& encoder, DenseNet& decoder, const Matrix& X,
                                     const DeepSadHyperparams& hp, Rng& rng) {
  DenseNet ae;
  ae.layers = encoder.layers;
  ae.layers.insert(ae.layers.end(), decoder.layers.begin(), decoder.layers.end());
  AdamState adam = AdamState::init(ae);
  AdamParams opt;
  opt.lr = hp.lr_pretrain;

  TrainLog log;
  const int n = static_cast<int>(X.cols());
  for (int epoch = 0; epoch < hp.epochs_pretrain; ++epoch) {
    double epoch_loss = 0.0;
    for (const auto& batch : detail::shuffled_batches(n, hp.batch_size, rng)) {
      Matrix Xb = detail::gather_cols(X, batch);
      ForwardCache cache = forward(ae, Xb);
      Matrix err = cache.output() - Xb;
      const double denom = static_cast<double>(Xb.size());
      double loss = err.squaredNorm() / denom;
      if (!std::isfinite(loss)) throw ArgumentError("autoencoder pretraining diverged");
      NetGrads grads = backward(ae, cache, (2.0 / denom) * err);
      adam_step(ae, grads, adam, opt);
      epoch_loss += loss * static_cast<double>(batch.size());
    }
    log.epoch_loss.push_back(epoch_loss / static_cast<double>(n));
  }
  for (size_t i = 0; i < encoder.layers.size(); ++i) encoder.layers[i] = ae.layers[i];
  for (size_t i = 0; i < decoder.layers.size(); ++i)
    decoder.layers[i] = ae.layers[encoder.layers.size() + i];
  return log;
}

/// Hypersphere center: mean embedding of the training data, with components
/// inside the (-eps, eps) guard band pushed outwards. Exact zeros go to +eps.
inline Vector init_center(const DenseNet& encoder, const Matrix& X, double eps) {
  Vector c = forward(encoder, X).output().rowwise().mean();
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    if (c[i] >= 0.0 && c[i] < eps) c[i] += eps;
    else if (c[i] < 0.0 && c[i] > -eps) c[i] -= eps;
  }
  return c;
}

// ---------------------------------------------------------------------------
// Loss
// ---------------------------------------------------------------------------

struct DeepSadLossTerms {
  double ds = 0.0;         // distance / labeled-power term
  double l2 = 0.0;         // sum of squared weights (unweighted)
  double diversity = 0.0;  // trace - logdet of the batch Gram (unweighted)
  double total = 0.0;
};

/// Loss of one mini-batch plus, when grads_out is given, gradients for every
/// encoder parameter. Labeled and unlabeled samples partition the batch.
inline DeepSadLossTerms deepsad_loss_and_grads(const DenseNet& encoder, const Matrix& Xb,
                                               std::span<const double> labels,
                                               std::span<const uint8_t> labeled,
                                               const Vector& center,
                                               const DeepSadHyperparams& hp,
                                               NetGrads* grads_out = nullptr) {
  const Eigen::Index B = Xb.cols();
  if (static_cast<size_t>(B) != labels.size() || labels.size() != labeled.size())
    throw ArgumentError("deepsad loss: batch/label size mismatch");

  ForwardCache cache = forward(encoder, Xb);
  const Matrix& Z = cache.output();  // embed_dim x B
  Matrix diffs = Z.colwise() - center;

  DeepSadLossTerms terms;
  Matrix dZ = Matrix::Zero(Z.rows(), Z.cols());
  const double inv_b = 1.0 / static_cast<double>(B);
  for (Eigen::Index j = 0; j < B; ++j) {
    const double y = diffs.col(j).norm();
    if (labeled[static_cast<size_t>(j)]) {
      const double base = y + hp.eps;
      const double expo = 2.0 * labels[static_cast<size_t>(j)];
      terms.ds += hp.eta * inv_b * std::pow(base, expo);
      const double dy = hp.eta * inv_b * expo * std::pow(base, expo - 1.0);
      dZ.col(j) = dy * diffs.col(j) / std::max(y, 1e-300);
    } else {
      terms.ds += inv_b * y * y;
      dZ.col(j) = 2.0 * inv_b * diffs.col(j);
    }
  }

  GramTraceLogdet div = gram_trace_logdet(Z.transpose(), hp.eps);
  terms.diversity = div.value;
  dZ += hp.lambda * div.grad.transpose();

  for (const auto& l : encoder.layers) terms.l2 += l.W.squaredNorm();
  terms.total = terms.ds + hp.nu * terms.l2 + hp.lambda * terms.diversity;
  if (!std::isfinite(terms.total)) throw ArgumentError("deepsad loss is non-finite");

  if (grads_out) {
    *grads_out = backward(encoder, cache, dZ);
    for (size_t i = 0; i < encoder.layers.size(); ++i)
      grads_out->layers[i].dW += 2.0 * hp.nu * encoder.layers[i].W;
  }
  return terms;
}

/// Trains the (pretrained) encoder against the fixed center. The center is
/// never a trained parameter.
inline TrainLog train_deepsad(DenseNet& encoder, const Matrix& X,
                              const AuxiliaryLabeling& labeling, const Vector& center,
                              const DeepSadHyperparams& hp, Rng& rng) {
  if (static_cast<size_t>(X.cols()) != labeling.size())
    throw ArgumentError("train_deepsad: labeling does not match data");
  AdamState adam = AdamState::init(encoder);
  AdamParams opt;
  opt.lr = hp.lr;

  TrainLog log;
  const int n = static_cast<int>(X.cols());
  std::vector<double> batch_labels;
  std::vector<uint8_t> batch_labeled;
  for (int epoch = 0; epoch < hp.epochs; ++epoch) {
    double epoch_loss = 0.0;
    for (const auto& batch : detail::shuffled_batches(n, hp.batch_size, rng)) {
      Matrix Xb = detail::gather_cols(X, batch);
      batch_labels.clear();
      batch_labeled.clear();
      for (int idx : batch) {
        batch_labels.push_back(labeling.label[static_cast<size_t>(idx)]);
        batch_labeled.push_back(labeling.labeled[static_cast<size_t>(idx)]);
      }
      NetGrads grads;
      DeepSadLossTerms terms =
          deepsad_loss_and_grads(encoder, Xb, batch_labels, batch_labeled, center, hp, &grads);
      adam_step(encoder, grads, adam, opt);
      epoch_loss += terms.total * static_cast<double>(batch.size());
    }
    log.epoch_loss.push_back(epoch_loss / static_cast<double>(n));
  }
  return log;
}

/// Raw HI: Euclidean distance of each column's embedding to the center.
inline std::vector<double> deepsad_raw_hi(const DenseNet& encoder, const Vector& center,
                                          const Matrix& X) {
  Matrix Z = forward(encoder, X).output();
  std::vector<double> hi(static_cast<size_t>(X.cols()));
  for (Eigen::Index j = 0; j < X.cols(); ++j)
    hi[static_cast<size_t>(j)] = (Z.col(j) - center).norm();
  return hi;
}

}  // namespace gwhi

#endif  // GWHI_DEEPSAD_HPP
