// include/gwhi/dtcvae.hpp

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
// Degradation-trend-constrained VAE: one sigmoid hidden layer, width-1 mean
// and log-variance heads, mirrored decoder, and the three-term loss
// (KL to the standard normal, reconstruction, per-step latent growth toward
// the degradation rate r).

#ifndef GWHI_DTCVAE_HPP
#define GWHI_DTCVAE_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "gwhi/common.hpp"
#include "gwhi/neural.hpp"

namespace gwhi {

struct DtcVaeHyperparams {
  // Searchable (Table 4 bounds); defaults are range midpoints.
  int hidden = 50;       // [40, 60]
  int batch_size = 85;   // [75, 95]
  double lr = 0.0055;    // [0.001, 0.01]
  int epochs = 550;      // [500, 600]
  double alpha = 1.6;    // KL weight, [1.4, 1.8]
  double beta = 2.8;     // reconstruction weight, [2.6, 3.0]
  double gamma = 0.075;  // trend-constraint weight, [0.05, 0.1]
};

/// Encoder hidden + two width-1 heads, decoder hidden (same width) + linear
/// output. Layer order in `layers`: enc_hidden, enc_mu, enc_logvar,
/// dec_hidden, dec_out.
struct VaeNet {
  std::vector<DenseLayer> layers;

  DenseLayer& enc_hidden() { return layers[0]; }
  DenseLayer& enc_mu() { return layers[1]; }
  DenseLayer& enc_logvar() { return layers[2]; }
  DenseLayer& dec_hidden() { return layers[3]; }
  DenseLayer& dec_out() { return layers[4]; }
  const DenseLayer& enc_hidden() const { return layers[0]; }
  const DenseLayer& enc_mu() const { return layers[1]; }
  const DenseLayer& enc_logvar() const { return layers[2]; }
  const DenseLayer& dec_hidden() const { return layers[3]; }
  const DenseLayer& dec_out() const { return layers[4]; }

  int input_width() const { return enc_hidden().in_width(); }

  void validate() const {
    if (layers.size() != 5) throw ArgumentError("VAE needs exactly 5 layers");
    if (enc_mu().out_width() != 1 || enc_logvar().out_width() != 1)
      throw ArgumentError("VAE latent heads must have width 1");
    if (dec_hidden().out_width() != enc_hidden().out_width())
      throw ArgumentError("decoder hidden width must mirror the encoder");
    if (dec_out().out_width() != input_width())
      throw ArgumentError("decoder output width must equal the input width");
  }
};

inline VaeNet build_vae(int input_width, int hidden, Rng& rng) {
  if (input_width < 1 || hidden < 1) throw ArgumentError("build_vae: bad dimensions");
  VaeNet net;
  net.layers.push_back(make_layer(input_width, hidden, Activation::Sigmoid, rng));
  net.layers.push_back(make_layer(hidden, 1, Activation::Linear, rng));
  net.layers.push_back(make_layer(hidden, 1, Activation::Linear, rng));
  net.layers.push_back(make_layer(1, hidden, Activation::Sigmoid, rng));
  net.layers.push_back(make_layer(hidden, input_width, Activation::Linear, rng));
  return net;
}

/// z = mu + exp(logvar / 2) * noise. Gradient flows to mu and logvar only.
inline double reparameterize(double mu, double logvar, double noise) {
  return mu + std::exp(0.5 * logvar) * noise;
}

struct VaeLossTerms {
  double kl = 0.0;  // unweighted sums
  double re = 0.0;
  double mo = 0.0;
  double total = 0.0;
};

/// Loss of one batch whose columns are time-ordered within each specimen;
/// the trend term pairs consecutive columns of the same specimen only.
/// grads_out, when given, receives gradients in the net's layer order.
inline VaeLossTerms dtcvae_loss_and_grads(const VaeNet& net, const Matrix& Xb,
                                          std::span<const int> specimen_of_col,
                                          std::span<const double> noise,
                                          const DtcVaeHyperparams& hp, double rate,
                                          std::vector<LayerGrads>* grads_out = nullptr) {
  const Eigen::Index B = Xb.cols();
  if (static_cast<size_t>(B) != specimen_of_col.size() || specimen_of_col.size() != noise.size())
    throw ArgumentError("dtcvae loss: batch annotation size mismatch");

  // Forward.
  Matrix preH = net.enc_hidden().W * Xb;
  preH.colwise() += net.enc_hidden().b;
  Matrix H = activate(preH, Activation::Sigmoid);
  Eigen::RowVectorXd mu = (net.enc_mu().W * H).row(0) + net.enc_mu().b[0] * Eigen::RowVectorXd::Ones(B);
  Eigen::RowVectorXd lv =
      (net.enc_logvar().W * H).row(0) + net.enc_logvar().b[0] * Eigen::RowVectorXd::Ones(B);
  Eigen::RowVectorXd z(B);
  for (Eigen::Index j = 0; j < B; ++j)
    z[j] = reparameterize(mu[j], lv[j], noise[static_cast<size_t>(j)]);
  Matrix preHd = net.dec_hidden().W * z;  // (hidden x 1) * (1 x B)
  preHd.colwise() += net.dec_hidden().b;
  Matrix Hd = activate(preHd, Activation::Sigmoid);
  Matrix xhat = net.dec_out().W * Hd;
  xhat.colwise() += net.dec_out().b;

  // Loss terms.
  VaeLossTerms terms;
  for (Eigen::Index j = 0; j < B; ++j)
    terms.kl += -0.5 * (1.0 + lv[j] - std::exp(lv[j]) - mu[j] * mu[j]);
  terms.re = (Xb - xhat).squaredNorm();
  Eigen::RowVectorXd dz_mo = Eigen::RowVectorXd::Zero(B);
  for (Eigen::Index j = 1; j < B; ++j) {
    if (specimen_of_col[static_cast<size_t>(j)] != specimen_of_col[static_cast<size_t>(j - 1)])
      continue;
    const double e = z[j] - z[j - 1] - rate;
    terms.mo += e * e;
    dz_mo[j] += 2.0 * e;
    dz_mo[j - 1] -= 2.0 * e;
  }
  terms.total = hp.alpha * terms.kl + hp.beta * terms.re + hp.gamma * terms.mo;
  if (!std::isfinite(terms.total)) throw ArgumentError("dtcvae loss is non-finite");
  if (!grads_out) return terms;

  // Backward.
  Matrix dxhat = 2.0 * hp.beta * (xhat - Xb);
  LayerGrads g_dec_out{dxhat * Hd.transpose(), dxhat.rowwise().sum()};
  Matrix dHd = net.dec_out().W.transpose() * dxhat;
  Matrix dPreHd = dHd.cwiseProduct((Hd.array() * (1.0 - Hd.array())).matrix());
  LayerGrads g_dec_hidden{dPreHd * z.transpose(), dPreHd.rowwise().sum()};
  Eigen::RowVectorXd dz = (net.dec_hidden().W.transpose() * dPreHd).row(0);
  dz += hp.gamma * dz_mo;

  Eigen::RowVectorXd dmu = dz + hp.alpha * mu;
  Eigen::RowVectorXd dlv(B);
  for (Eigen::Index j = 0; j < B; ++j) {
    dlv[j] = dz[j] * noise[static_cast<size_t>(j)] * 0.5 * std::exp(0.5 * lv[j]) +
             hp.alpha * 0.5 * (std::exp(lv[j]) - 1.0);
  }
  LayerGrads g_mu{dmu * H.transpose(), Vector::Constant(1, dmu.sum())};
  LayerGrads g_lv{dlv * H.transpose(), Vector::Constant(1, dlv.sum())};
  Matrix dH = net.enc_mu().W.transpose() * dmu + net.enc_logvar().W.transpose() * dlv;
  Matrix dPreH = dH.cwiseProduct((H.array() * (1.0 - H.array())).matrix());
  LayerGrads g_enc_hidden{dPreH * Xb.transpose(), dPreH.rowwise().sum()};

  grads_out->clear();
  grads_out->push_back(std::move(g_enc_hidden));
  grads_out->push_back(std::move(g_mu));
  grads_out->push_back(std::move(g_lv));
  grads_out->push_back(std::move(g_dec_hidden));
  grads_out->push_back(std::move(g_dec_out));
  return terms;
}

/// Encoder mean for every column (the deterministic HI before
/// normalization).
inline Eigen::RowVectorXd dtcvae_latent_mean(const VaeNet& net, const Matrix& X) {
  Matrix preH = net.enc_hidden().W * X;
  preH.colwise() += net.enc_hidden().b;
  Matrix H = activate(preH, Activation::Sigmoid);
  return (net.enc_mu().W * H).row(0) +
         net.enc_mu().b[0] * Eigen::RowVectorXd::Ones(X.cols());
}

struct DtcVaeTrainResult {
  std::vector<double> epoch_loss;
  double rate = 0.0;             // r drawn once per run from (9, 10)
  bool posterior_collapse = false;
};

/// Adam descent on the three-term loss. Columns of X must be time-ordered
/// within each specimen; batches are cut from the concatenation of whole
/// specimens in seeded-shuffled specimen order, so each batch carries
/// contiguous time blocks.
inline DtcVaeTrainResult train_dtcvae(VaeNet& net, const Matrix& X,
                                      std::span<const int> specimen_of_col,
                                      const DtcVaeHyperparams& hp, Rng& rng,
                                      Warnings* warnings = nullptr) {
  net.validate();
  if (static_cast<size_t>(X.cols()) != specimen_of_col.size())
    throw ArgumentError("train_dtcvae: specimen annotation size mismatch");

  DtcVaeTrainResult result;
  result.rate = rng.uniform(9.0, 10.0);

  // Column ranges of each specimen (columns arrive grouped).
  std::vector<std::pair<int, int>> groups;
  for (int j = 0; j < static_cast<int>(X.cols()); ++j) {
    if (groups.empty() || specimen_of_col[static_cast<size_t>(j)] !=
                              specimen_of_col[static_cast<size_t>(groups.back().first)])
      groups.push_back({j, j + 1});
    else
      groups.back().second = j + 1;
  }

  AdamState adam = AdamState::init(net.layers);
  AdamParams opt;
  opt.lr = hp.lr;
  std::vector<LayerGrads> grads;
  std::vector<int> order(groups.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < hp.epochs; ++epoch) {
    rng.shuffle(order);
    std::vector<int> cols;
    for (int gi : order)
      for (int j = groups[static_cast<size_t>(gi)].first;
           j < groups[static_cast<size_t>(gi)].second; ++j)
        cols.push_back(j);

    double epoch_loss = 0.0;
    for (size_t start = 0; start < cols.size(); start += static_cast<size_t>(hp.batch_size)) {
      size_t end = std::min(cols.size(), start + static_cast<size_t>(hp.batch_size));
      const auto b = static_cast<Eigen::Index>(end - start);
      Matrix Xb(X.rows(), b);
      std::vector<int> spec_b(static_cast<size_t>(b));
      std::vector<double> noise(static_cast<size_t>(b));
      for (Eigen::Index k = 0; k < b; ++k) {
        int col = cols[start + static_cast<size_t>(k)];
        Xb.col(k) = X.col(col);
        spec_b[static_cast<size_t>(k)] = specimen_of_col[static_cast<size_t>(col)];
        noise[static_cast<size_t>(k)] = rng.normal();
      }
      VaeLossTerms terms =
          dtcvae_loss_and_grads(net, Xb, spec_b, noise, hp, result.rate, &grads);
      adam_step(net.layers, grads, adam, opt);
      epoch_loss += terms.total;
    }
    result.epoch_loss.push_back(epoch_loss);
  }

  // Posterior-collapse detector: latent mean carries no variance.
  Eigen::RowVectorXd mu = dtcvae_latent_mean(net, X);
  double m = mu.mean();
  double var = (mu.array() - m).square().sum() / static_cast<double>(mu.size());
  if (var < 1e-8) {
    result.posterior_collapse = true;
    warn(warnings, "dtcvae posterior collapse: latent mean variance " + fmt_double(var));
  }
  return result;
}

}  // namespace gwhi

#endif  // GWHI_DTCVAE_HPP
