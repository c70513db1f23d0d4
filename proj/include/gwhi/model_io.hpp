// include/gwhi/model_io.hpp

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
// Versioned JSON serialization of trained models: layer dims and weights,
// normalizer statistics, hypersphere center / latent orientation, the seed
// and the hyperparameters that produced them.

#ifndef GWHI_MODEL_IO_HPP
#define GWHI_MODEL_IO_HPP

#include <json.hpp>
#include <string>
#include <vector>

#include "gwhi/data.hpp"
#include "gwhi/deepsad.hpp"
#include "gwhi/dtcvae.hpp"
#include "gwhi/neural.hpp"

namespace gwhi {

using json = nlohmann::json;

namespace detail {

inline json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix matrix_from_json(const json& j) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows > 0 ? static_cast<Eigen::Index>(j[0].size()) : 0;
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c)
      m(r, c) = j[static_cast<size_t>(r)][static_cast<size_t>(c)].get<double>();
  return m;
}

inline json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

inline Vector vector_from_json(const json& j) {
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = j[static_cast<size_t>(i)].get<double>();
  return v;
}

inline json layer_to_json(const DenseLayer& l) {
  json j;
  j["activation"] = activation_name(l.act);
  j["W"] = matrix_to_json(l.W);
  if (l.has_bias()) j["b"] = vector_to_json(l.b);
  return j;
}

inline DenseLayer layer_from_json(const json& j) {
  DenseLayer l;
  l.act = activation_from_name(j.at("activation").get<std::string>());
  l.W = matrix_from_json(j.at("W"));
  if (j.contains("b")) l.b = vector_from_json(j.at("b"));
  return l;
}

inline json zscore_to_json(const ZScoreNormalizer& z) {
  json j;
  j["mean"] = vector_to_json(z.mean);
  j["std"] = vector_to_json(z.stddev);
  j["degenerate"] = z.degenerate;
  return j;
}

inline ZScoreNormalizer zscore_from_json(const json& j) {
  ZScoreNormalizer z;
  z.mean = vector_from_json(j.at("mean"));
  z.stddev = vector_from_json(j.at("std"));
  z.degenerate = j.at("degenerate").get<std::vector<uint8_t>>();
  return z;
}

inline json minmax_to_json(const MinMaxNormalizer& m) {
  return json{{"min", m.min}, {"max", m.max}, {"degenerate", m.degenerate}};
}

inline MinMaxNormalizer minmax_from_json(const json& j) {
  MinMaxNormalizer m;
  m.min = j.at("min").get<double>();
  m.max = j.at("max").get<double>();
  m.degenerate = j.at("degenerate").get<bool>();
  return m;
}

}  // namespace detail

struct TrainedDeepSad {
  DenseNet encoder;
  Vector center;
  ZScoreNormalizer zscore;
  MinMaxNormalizer hi_minmax;
  DeepSadHyperparams hp;
  uint64_t seed = 0;
  std::vector<int> feature_ids;
  double freq_khz = 0.0;
  int fold_test_specimen = 0;
};

struct TrainedDtcVae {
  VaeNet net;
  double orientation_sign = 1.0;
  double rate = 0.0;
  bool posterior_collapse = false;
  ZScoreNormalizer zscore;
  MinMaxNormalizer hi_minmax;
  DtcVaeHyperparams hp;
  uint64_t seed = 0;
  std::vector<int> feature_ids;
  double freq_khz = 0.0;
  int fold_test_specimen = 0;
};

inline void save_model(const fs::path& path, const TrainedDeepSad& m) {
  json j;
  j["format"] = "gwhi-model";
  j["version"] = 1;
  j["model"] = "deepsad";
  j["seed"] = m.seed;
  j["freq_khz"] = m.freq_khz;
  j["fold_test_specimen"] = m.fold_test_specimen;
  j["feature_ids"] = m.feature_ids;
  j["zscore"] = detail::zscore_to_json(m.zscore);
  j["hi_minmax"] = detail::minmax_to_json(m.hi_minmax);
  j["hyperparams"] = {{"batch_size", m.hp.batch_size},
                      {"lr_pretrain", m.hp.lr_pretrain},
                      {"lr", m.hp.lr},
                      {"epochs_pretrain", m.hp.epochs_pretrain},
                      {"epochs", m.hp.epochs},
                      {"nu", m.hp.nu},
                      {"eta", m.hp.eta},
                      {"lambda", m.hp.lambda},
                      {"eps", m.hp.eps},
                      {"embedding_dim", m.hp.embedding_dim},
                      {"hidden_layers", m.hp.hidden_layers}};
  j["center"] = detail::vector_to_json(m.center);
  json layers = json::array();
  for (const auto& l : m.encoder.layers) layers.push_back(detail::layer_to_json(l));
  j["layers"] = std::move(layers);
  write_file_atomic(path, j.dump(1));
}

inline TrainedDeepSad load_deepsad(const fs::path& path) {
  json j = json::parse(read_file(path));
  if (j.at("format") != "gwhi-model" || j.at("model") != "deepsad")
    throw IoError(path.string() + " is not a deepsad model file");
  if (j.at("version").get<int>() != 1) throw IoError("unsupported model version");
  TrainedDeepSad m;
  m.seed = j.at("seed").get<uint64_t>();
  m.freq_khz = j.at("freq_khz").get<double>();
  m.fold_test_specimen = j.at("fold_test_specimen").get<int>();
  m.feature_ids = j.at("feature_ids").get<std::vector<int>>();
  m.zscore = detail::zscore_from_json(j.at("zscore"));
  m.hi_minmax = detail::minmax_from_json(j.at("hi_minmax"));
  const json& hp = j.at("hyperparams");
  m.hp.batch_size = hp.at("batch_size").get<int>();
  m.hp.lr_pretrain = hp.at("lr_pretrain").get<double>();
  m.hp.lr = hp.at("lr").get<double>();
  m.hp.epochs_pretrain = hp.at("epochs_pretrain").get<int>();
  m.hp.epochs = hp.at("epochs").get<int>();
  m.hp.nu = hp.at("nu").get<double>();
  m.hp.eta = hp.at("eta").get<double>();
  m.hp.lambda = hp.at("lambda").get<double>();
  m.hp.eps = hp.at("eps").get<double>();
  m.hp.embedding_dim = hp.at("embedding_dim").get<int>();
  m.hp.hidden_layers = hp.at("hidden_layers").get<int>();
  m.center = detail::vector_from_json(j.at("center"));
  for (const auto& lj : j.at("layers")) m.encoder.layers.push_back(detail::layer_from_json(lj));
  m.encoder.validate();
  return m;
}

inline void save_model(const fs::path& path, const TrainedDtcVae& m) {
  json j;
  j["format"] = "gwhi-model";
  j["version"] = 1;
  j["model"] = "dtcvae";
  j["seed"] = m.seed;
  j["freq_khz"] = m.freq_khz;
  j["fold_test_specimen"] = m.fold_test_specimen;
  j["feature_ids"] = m.feature_ids;
  j["zscore"] = detail::zscore_to_json(m.zscore);
  j["hi_minmax"] = detail::minmax_to_json(m.hi_minmax);
  j["orientation_sign"] = m.orientation_sign;
  j["rate"] = m.rate;
  j["posterior_collapse"] = m.posterior_collapse;
  j["hyperparams"] = {{"hidden", m.hp.hidden},     {"batch_size", m.hp.batch_size},
                      {"lr", m.hp.lr},             {"epochs", m.hp.epochs},
                      {"alpha", m.hp.alpha},       {"beta", m.hp.beta},
                      {"gamma", m.hp.gamma}};
  json layers = json::array();
  for (const auto& l : m.net.layers) layers.push_back(detail::layer_to_json(l));
  j["layers"] = std::move(layers);
  write_file_atomic(path, j.dump(1));
}

inline TrainedDtcVae load_dtcvae(const fs::path& path) {
  json j = json::parse(read_file(path));
  if (j.at("format") != "gwhi-model" || j.at("model") != "dtcvae")
    throw IoError(path.string() + " is not a dtcvae model file");
  if (j.at("version").get<int>() != 1) throw IoError("unsupported model version");
  TrainedDtcVae m;
  m.seed = j.at("seed").get<uint64_t>();
  m.freq_khz = j.at("freq_khz").get<double>();
  m.fold_test_specimen = j.at("fold_test_specimen").get<int>();
  m.feature_ids = j.at("feature_ids").get<std::vector<int>>();
  m.zscore = detail::zscore_from_json(j.at("zscore"));
  m.hi_minmax = detail::minmax_from_json(j.at("hi_minmax"));
  m.orientation_sign = j.at("orientation_sign").get<double>();
  m.rate = j.at("rate").get<double>();
  m.posterior_collapse = j.at("posterior_collapse").get<bool>();
  const json& hp = j.at("hyperparams");
  m.hp.hidden = hp.at("hidden").get<int>();
  m.hp.batch_size = hp.at("batch_size").get<int>();
  m.hp.lr = hp.at("lr").get<double>();
  m.hp.epochs = hp.at("epochs").get<int>();
  m.hp.alpha = hp.at("alpha").get<double>();
  m.hp.beta = hp.at("beta").get<double>();
  m.hp.gamma = hp.at("gamma").get<double>();
  for (const auto& lj : j.at("layers")) m.net.layers.push_back(detail::layer_from_json(lj));
  m.net.validate();
  return m;
}

}  // namespace gwhi

#endif  // GWHI_MODEL_IO_HPP
