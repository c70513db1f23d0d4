// tests/test_deepsad.cpp

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

#include <catch2/catch_amalgamated.hpp>

#include "gwhi/deepsad.hpp"
#include "gwhi/pipeline.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace gwhi;
using Catch::Approx;

namespace {

std::vector<double> flatten(const DenseNet& net) {
  std::vector<double> out;
  for (const auto& l : net.layers) {
    for (Eigen::Index c = 0; c < l.W.cols(); ++c)
      for (Eigen::Index r = 0; r < l.W.rows(); ++r) out.push_back(l.W(r, c));
    for (Eigen::Index i = 0; i < l.b.size(); ++i) out.push_back(l.b[i]);
  }
  return out;
}

void restore(DenseNet& net, const std::vector<double>& params) {
  size_t at = 0;
  for (auto& l : net.layers) {
    for (Eigen::Index c = 0; c < l.W.cols(); ++c)
      for (Eigen::Index r = 0; r < l.W.rows(); ++r) l.W(r, c) = params[at++];
    for (Eigen::Index i = 0; i < l.b.size(); ++i) l.b[i] = params[at++];
  }
}

}  // namespace

TEST_CASE("auxiliary labels follow the quarter schedule") {
  std::vector<double> times = {0, 1, 2, 3, 4, 5, 6, 7, 8};  // t_N = 8
  auto lab = make_labels(times);
  CHECK(lab.labeled[0] == 1);
  CHECK(lab.label[0] == 1.0);                      // t = 0
  CHECK(lab.labeled[8] == 1);
  CHECK(lab.label[8] == -1.0);                     // t = t_N
  CHECK(lab.labeled[2] == 1);                      // t/t_N = 0.25, boundary included
  CHECK(lab.label[2] == Approx(0.5));
  CHECK(lab.labeled[6] == 1);                      // t/t_N = 0.75
  CHECK(lab.label[6] == Approx(-0.5));
  CHECK(lab.labeled[3] == 0);                      // middle half unlabeled
  CHECK(lab.labeled[4] == 0);
  CHECK(lab.labeled[5] == 0);

  CHECK_THROWS_AS(make_labels(std::vector<double>{-2.0, -1.0, 0.0}), ArgumentError);
  CHECK_THROWS_AS(make_labels(std::vector<double>{0.0, 3.0, 2.0}), ArgumentError);
}

TEST_CASE("label schedule on random monotone grids") {
  Rng rng(5);
  for (int rep = 0; rep < 25; ++rep) {
    std::vector<double> times = {0.0};
    int n = rng.uniform_int(5, 60);
    for (int i = 1; i < n; ++i) times.push_back(times.back() + rng.uniform(0.5, 10.0));
    auto lab = make_labels(times);
    double tN = times.back();
    for (size_t i = 0; i < times.size(); ++i) {
      double frac = times[i] / tN;
      bool expect = frac <= 0.25 || frac >= 0.75;
      CHECK(lab.labeled[i] == (expect ? 1 : 0));
      if (expect) CHECK(lab.label[i] == Approx(1.0 - 2.0 * frac).margin(1e-12));
    }
  }
}

TEST_CASE("encoder has 6 layers, halving widths floored at 16, bias-free output") {
  Rng rng(2);
  DeepSadHyperparams hp;
  DenseNet enc = build_deepsad_encoder(139, hp, rng);
  REQUIRE(enc.layers.size() == 6);
  CHECK(enc.layers[0].out_width() == 69);
  CHECK(enc.layers[1].out_width() == 34);
  CHECK(enc.layers[2].out_width() == 17);
  CHECK(enc.layers[3].out_width() == 16);  // floor(139/16)=8 -> clamped to 16
  CHECK(enc.layers[4].out_width() == 16);
  CHECK(enc.layers[5].out_width() == 16);
  CHECK_FALSE(enc.layers[5].has_bias());
  CHECK(enc.layers[5].act == Activation::Linear);
  for (size_t i = 0; i + 1 < enc.layers.size(); ++i)
    CHECK(enc.layers[i].act == Activation::LeakyRelu);

  DenseNet dec = build_mirror_decoder(enc, rng);
  CHECK(dec.layers.front().in_width() == 16);
  CHECK(dec.layers.back().out_width() == 139);
}

TEST_CASE("center rule is bitwise exact") {
  Rng rng(4);
  DenseNet identity;
  DenseLayer l;
  l.W = Matrix::Identity(4, 4);
  l.act = Activation::Linear;
  identity.layers.push_back(l);
  Matrix X(4, 1);
  X << 0.3, 1e-9, -1e-9, 0.0;
  Vector c = init_center(identity, X, 1e-6);
  CHECK(c[0] == 0.3);
  CHECK(c[1] == 1e-9 + 1e-6);
  CHECK(c[2] == -1e-9 - 1e-6);
  CHECK(c[3] == 1e-6);  // exact zero moves up
}

TEST_CASE("loss fixtures: at-center unlabeled and eta recovery") {
  Rng rng(6);
  DenseNet identity;
  DenseLayer l;
  l.W = Matrix::Identity(3, 3);
  l.act = Activation::Linear;
  identity.layers.push_back(l);
  DeepSadHyperparams hp;

  Vector c(3);
  c << 0.5, -0.25, 1.0;
  Matrix X = c;  // one unlabeled sample exactly at the center
  std::vector<double> labels = {0.0};
  std::vector<uint8_t> labeled = {0};
  auto terms = deepsad_loss_and_grads(identity, X, labels, labeled, c, hp);
  CHECK(terms.ds == 0.0);

  // labeled sample with label -1 at distance 1: term = eta (1 + eps)^-2
  Matrix X2(3, 1);
  X2 << c[0] + 1.0, c[1], c[2];
  std::vector<double> labels2 = {-1.0};
  std::vector<uint8_t> labeled2 = {1};
  auto t2 = deepsad_loss_and_grads(identity, X2, labels2, labeled2, c, hp);
  CHECK(t2.ds == Approx(hp.eta * std::pow(1.0 + hp.eps, -2.0)).epsilon(1e-12));
}

TEST_CASE("total loss gradient matches finite differences") {
  Rng rng(31);
  int checked = 0;
  for (int rep = 0; rep < 8; ++rep) {
    DeepSadHyperparams hp;
    hp.embedding_dim = 3 + rep % 3;
    hp.hidden_layers = 3;
    const int in = 5 + rep % 4;
    const int batch = hp.embedding_dim + 3;
    DenseNet enc = build_deepsad_encoder(in, hp, rng);
    Matrix X = glorot_uniform(in, batch, rng) * 2.0;
    std::vector<double> labels(static_cast<size_t>(batch), 0.0);
    std::vector<uint8_t> labeled(static_cast<size_t>(batch), 0);
    for (int j = 0; j < batch; ++j) {
      if (j % 2 == 0) {
        labeled[static_cast<size_t>(j)] = 1;
        labels[static_cast<size_t>(j)] = j % 4 ? 1.0 - 0.1 * j : -1.0 + 0.05 * j;
      }
    }
    Vector c = init_center(enc, X, hp.eps);

    NetGrads grads;
    deepsad_loss_and_grads(enc, X, labels, labeled, c, hp, &grads);
    std::vector<double> got;
    for (size_t li = 0; li < enc.layers.size(); ++li) {
      const auto& lay = enc.layers[li];
      for (Eigen::Index cc = 0; cc < lay.W.cols(); ++cc)
        for (Eigen::Index rr = 0; rr < lay.W.rows(); ++rr) got.push_back(grads.layers[li].dW(rr, cc));
      for (Eigen::Index i = 0; i < lay.b.size(); ++i) got.push_back(grads.layers[li].db[i]);
    }
    auto loss_of = [&](const std::vector<double>& params) {
      DenseNet copy = enc;
      restore(copy, params);
      return deepsad_loss_and_grads(copy, X, labels, labeled, c, hp).total;
    };
    auto want = oracles::central_differences(loss_of, flatten(enc));
    CHECK(oracles::max_rel_error(got, want, 1e-4) < 1e-4);
    ++checked;
  }
  CHECK(checked == 8);
}

TEST_CASE("pretraining reduces reconstruction loss; zero epochs keep init") {
  Rng data_rng(8);
  const int in = 12, n = 60;
  Matrix X(in, n);
  for (int j = 0; j < n; ++j) {
    double d = static_cast<double>(j) / (n - 1);
    for (int i = 0; i < in; ++i)
      X(i, j) = (i % 2 ? d : -d) * (1.0 + 0.1 * i) + 0.05 * data_rng.normal();
  }
  DeepSadHyperparams hp;
  hp.embedding_dim = 4;
  hp.epochs_pretrain = 25;
  hp.batch_size = 16;
  hp.lr_pretrain = 1e-3;

  Rng rng(9);
  DenseNet enc = build_deepsad_encoder(in, hp, rng);
  DenseNet dec = build_mirror_decoder(enc, rng);
  TrainLog log = pretrain_autoencoder(enc, dec, X, hp, rng);
  CHECK(log.final_loss() < log.initial());

  // zero epochs: weights unchanged
  Rng rng2(9);
  DenseNet enc2 = build_deepsad_encoder(in, hp, rng2);
  DenseNet dec2 = build_mirror_decoder(enc2, rng2);
  DenseNet enc2_before = enc2;
  DeepSadHyperparams hp0 = hp;
  hp0.epochs_pretrain = 0;
  pretrain_autoencoder(enc2, dec2, X, hp0, rng2);
  CHECK(flatten(enc2) == flatten(enc2_before));

  // same seed -> identical pretrained weights
  Rng a(10), b(10);
  DenseNet ea = build_deepsad_encoder(in, hp, a);
  DenseNet da = build_mirror_decoder(ea, a);
  pretrain_autoencoder(ea, da, X, hp, a);
  DenseNet eb = build_deepsad_encoder(in, hp, b);
  DenseNet db = build_mirror_decoder(eb, b);
  pretrain_autoencoder(eb, db, X, hp, b);
  CHECK(flatten(ea) == flatten(eb));
}

TEST_CASE("training keeps the center bit-identical and HI non-negative") {
  auto tensor = helpers::model_test_tensor(3, {50.0}, 12, 16, 8, 21, 0.05);
  FoldContext ctx{&tensor, Fold{3, {1, 2}}, 50.0, helpers::first_ids(8), "cycles"};
  DeepSadHyperparams hp;
  hp.embedding_dim = 8;
  hp.epochs = 30;
  hp.epochs_pretrain = 5;
  hp.batch_size = 12;

  detail::FoldData fd = detail::prepare_fold_data(ctx);
  Rng rng(77);
  Matrix X(8, fd.rows[0].rows() + fd.rows[1].rows());
  X << fd.rows[0].transpose(), fd.rows[1].transpose();
  AuxiliaryLabeling lab;
  for (size_t s = 0; s < 2; ++s) {
    auto part = make_labels(fd.times[s]);
    lab.label.insert(lab.label.end(), part.label.begin(), part.label.end());
    lab.labeled.insert(lab.labeled.end(), part.labeled.begin(), part.labeled.end());
  }
  DenseNet enc = build_deepsad_encoder(8, hp, rng);
  DenseNet dec = build_mirror_decoder(enc, rng);
  pretrain_autoencoder(enc, dec, X, hp, rng);
  Vector center = init_center(enc, X, hp.eps);
  Vector center_copy = center;
  train_deepsad(enc, X, lab, center, hp, rng);
  CHECK((center - center_copy).cwiseAbs().maxCoeff() == 0.0);  // never a parameter

  for (double y : deepsad_raw_hi(enc, center, X)) CHECK(y >= 0.0);
}

TEST_CASE("fold driver: determinism and normalized curves") {
  auto tensor = helpers::model_test_tensor(3, {50.0}, 12, 16, 8, 22, 0.05);
  FoldContext ctx{&tensor, Fold{3, {1, 2}}, 50.0, helpers::first_ids(8), "cycles"};
  DeepSadHyperparams hp;
  hp.embedding_dim = 8;
  hp.epochs = 20;
  hp.epochs_pretrain = 4;
  hp.batch_size = 12;

  auto [m1, c1] = train_deepsad_fold(ctx, hp, 5);
  auto [m2, c2] = train_deepsad_fold(ctx, hp, 5);
  REQUIRE(c1.size() == 3);
  for (size_t s = 0; s < c1.size(); ++s) CHECK(c1[s].values == c2[s].values);  // seed determinism

  // training curves inside [0,1] after min-max (pooled), test unclipped
  double lo = 1e9, hi = -1e9;
  for (size_t s = 0; s < c1.size(); ++s) {
    if (c1[s].specimen_id == 3) continue;
    for (double v : c1[s].values) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  CHECK(lo == Approx(0.0).margin(1e-12));
  CHECK(hi == Approx(1.0).margin(1e-12));

  // different seed -> different weights (sanity that seed matters)
  auto [m3, c3] = train_deepsad_fold(ctx, hp, 6);
  bool any_diff = false;
  for (size_t s = 0; s < c1.size() && !any_diff; ++s)
    any_diff = c1[s].values != c3[s].values;
  CHECK(any_diff);
}

TEST_CASE("model file round trip reproduces the HI curve") {
  auto tensor = helpers::model_test_tensor(3, {50.0}, 10, 12, 6, 23, 0.05);
  FoldContext ctx{&tensor, Fold{3, {1, 2}}, 50.0, helpers::first_ids(6), "cycles"};
  DeepSadHyperparams hp;
  hp.embedding_dim = 4;
  hp.epochs = 10;
  hp.epochs_pretrain = 3;
  hp.batch_size = 8;
  auto [model, curves] = train_deepsad_fold(ctx, hp, 3);

  fs::path dir = fs::temp_directory_path() / "gwhi_deepsad_rt";
  fs::create_directories(dir);
  save_model(dir / "m.json", model);
  TrainedDeepSad back = load_deepsad(dir / "m.json");
  CHECK(back.seed == 3);
  CHECK(back.feature_ids == model.feature_ids);

  detail::FoldData fd = detail::prepare_fold_data(ctx);
  for (size_t s = 0; s < fd.rows.size(); ++s) {
    auto raw_a = deepsad_raw_hi(model.encoder, model.center, fd.rows[s].transpose());
    auto raw_b = deepsad_raw_hi(back.encoder, back.center, fd.rows[s].transpose());
    CHECK(raw_a == raw_b);
  }
  fs::remove_all(dir);
}

TEST_CASE("min-max on two distances maps them to 0 and 1") {
  auto m = MinMaxNormalizer::fit({1.0, 3.0});
  CHECK(m.transform(1.0) == 0.0);
  CHECK(m.transform(3.0) == 1.0);
}

TEST_CASE("diversity term keeps more embedding dimensions active") {
  auto tensor = helpers::model_test_tensor(4, {50.0}, 14, 18, 10, 29, 0.1);
  FoldContext ctx{&tensor, Fold{4, {1, 2, 3}}, 50.0, helpers::first_ids(10), "cycles"};

  auto active_dims = [&](double lambda, uint64_t seed) {
    DeepSadHyperparams hp;
    hp.embedding_dim = 8;
    hp.epochs = 40;
    hp.epochs_pretrain = 5;
    hp.batch_size = 16;
    hp.nu = 0.001;  // small L2 so the diversity effect is observable
    hp.lambda = lambda;
    detail::FoldData fd = detail::prepare_fold_data(ctx);
    Rng rng(detail::run_stream_seed(seed, ctx));
    long n = 0;
    for (size_t s = 0; s < fd.rows.size(); ++s)
      if (fd.is_train[s]) n += fd.rows[s].rows();
    Matrix X(10, n);
    AuxiliaryLabeling lab;
    long at = 0;
    for (size_t s = 0; s < fd.rows.size(); ++s) {
      if (!fd.is_train[s]) continue;
      X.middleCols(at, fd.rows[s].rows()) = fd.rows[s].transpose();
      auto part = make_labels(fd.times[s]);
      lab.label.insert(lab.label.end(), part.label.begin(), part.label.end());
      lab.labeled.insert(lab.labeled.end(), part.labeled.begin(), part.labeled.end());
      at += fd.rows[s].rows();
    }
    DenseNet enc = build_deepsad_encoder(10, hp, rng);
    DenseNet dec = build_mirror_decoder(enc, rng);
    pretrain_autoencoder(enc, dec, X, hp, rng);
    Vector c = init_center(enc, X, hp.eps);
    train_deepsad(enc, X, lab, c, hp, rng);
    Matrix Z = forward(enc, X).output();
    int active = 0;
    for (Eigen::Index d = 0; d < Z.rows(); ++d) {
      double mean = Z.row(d).mean();
      double var = (Z.row(d).array() - mean).square().sum() / static_cast<double>(Z.cols());
      if (var > 1e-6) ++active;
    }
    return active;
  };

  double with = 0.0, without = 0.0;
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    with += active_dims(0.001, seed);
    without += active_dims(0.0, seed);
  }
  CHECK(with / 5.0 >= without / 5.0);
}
