// include/gwhi/pipeline.hpp

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
// Pipeline orchestration: generate -> extract -> rank -> train -> fuse ->
// evaluate -> report. Stage outputs are stamped with a content hash of the
// relevant configuration and upstream stamps so re-runs skip finished work.

#ifndef GWHI_PIPELINE_HPP
#define GWHI_PIPELINE_HPP

#include <atomic>
#include <functional>
#include <iostream>
#include <memory>
#include <mutex>
#include <optional>
#include <thread>

#include "gwhi/criteria.hpp"
#include "gwhi/data.hpp"
#include "gwhi/deepsad.hpp"
#include "gwhi/dtcvae.hpp"
#include "gwhi/ensemble.hpp"
#include "gwhi/features.hpp"
#include "gwhi/hyperopt.hpp"
#include "gwhi/model_io.hpp"
#include "gwhi/svg.hpp"
#include "gwhi/synthgen.hpp"

namespace gwhi {

// ---------------------------------------------------------------------------
// Run configuration
// ---------------------------------------------------------------------------

struct RunConfig {
  int version = 1;
  fs::path out_dir = "out";
  fs::path dataset_dir;                 // empty: stream synthetic blocks in-process
  std::optional<SynthSpec> synth;
  std::string dataset_encoding = "binary";
  std::string model = "dtcvae";         // deepsad | dtcvae
  std::string sp_method = "fft";        // raw | fft | ht | emd | stft
  std::vector<double> frequencies;      // subset; empty = all in dataset
  std::vector<int> folds;               // by test-specimen id; empty = all
  std::vector<uint64_t> seeds = {1, 2, 3, 4, 5};
  std::string time_axis = "cycles";     // cycles | index
  int jobs = 1;
  OptimizeBudget hyperopt{0, 0};        // n_init = 0 disables the search
  bool wae_leak_free = false;           // fusion weights from training specimens only
  bool eq2_population_std = true;
  DeepSadHyperparams deepsad;
  DtcVaeHyperparams dtcvae;
  json raw;                             // parsed source, kept for stage hashing

  CriteriaOptions criteria_options() const { return CriteriaOptions{eq2_population_std}; }

  std::string run_tag() const { return model + "_" + sp_method; }

  void validate() const {
    if (model != "deepsad" && model != "dtcvae")
      throw ConfigError("model must be deepsad or dtcvae, got '" + model + "'");
    sp_method_from_name(sp_method);
    if (time_axis != "cycles" && time_axis != "index")
      throw ConfigError("time_axis must be cycles or index");
    if (seeds.empty()) throw ConfigError("at least one seed is required");
    if (jobs < 1) throw ConfigError("jobs must be >= 1");
    if (dataset_dir.empty() && !synth)
      throw ConfigError("config needs dataset.dir and/or dataset.synth");
  }
};

inline SynthSpec synth_spec_from_json(const json& j) {
  SynthSpec s;
  if (j.contains("specimens")) s.specimens = j.at("specimens").get<int>();
  if (j.contains("min_timesteps")) s.min_timesteps = j.at("min_timesteps").get<int>();
  if (j.contains("max_timesteps")) s.max_timesteps = j.at("max_timesteps").get<int>();
  if (j.contains("paths")) s.paths = j.at("paths").get<int>();
  if (j.contains("frequencies")) s.frequencies_khz = j.at("frequencies").get<std::vector<double>>();
  if (j.contains("samples")) s.samples = j.at("samples").get<int>();
  if (j.contains("sample_rate")) s.sample_rate = j.at("sample_rate").get<double>();
  if (j.contains("law")) s.law = degradation_law_from_name(j.at("law").get<std::string>());
  if (j.contains("noise_level")) s.noise_level = j.at("noise_level").get<double>();
  if (j.contains("specimen_variability"))
    s.specimen_variability = j.at("specimen_variability").get<double>();
  if (j.contains("amp_drop")) s.amp_drop = j.at("amp_drop").get<double>();
  if (j.contains("delay_samples")) s.delay_samples = j.at("delay_samples").get<double>();
  if (j.contains("cycles_per_step")) s.cycles_per_step = j.at("cycles_per_step").get<long>();
  if (j.contains("seed")) s.seed = j.at("seed").get<uint64_t>();
  s.validate();
  return s;
}

inline RunConfig parse_config(const json& j) {
  RunConfig cfg;
  cfg.raw = j;
  if (j.contains("version")) cfg.version = j.at("version").get<int>();
  if (cfg.version != 1) throw ConfigError("unsupported config version");
  if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();
  if (j.contains("dataset")) {
    const json& d = j.at("dataset");
    if (d.contains("dir")) cfg.dataset_dir = d.at("dir").get<std::string>();
    if (d.contains("encoding")) cfg.dataset_encoding = d.at("encoding").get<std::string>();
    if (d.contains("synth")) cfg.synth = synth_spec_from_json(d.at("synth"));
  }
  if (j.contains("model")) cfg.model = j.at("model").get<std::string>();
  if (j.contains("sp_method")) cfg.sp_method = j.at("sp_method").get<std::string>();
  if (j.contains("frequencies")) cfg.frequencies = j.at("frequencies").get<std::vector<double>>();
  if (j.contains("folds")) cfg.folds = j.at("folds").get<std::vector<int>>();
  if (j.contains("seeds")) cfg.seeds = j.at("seeds").get<std::vector<uint64_t>>();
  if (j.contains("time_axis")) cfg.time_axis = j.at("time_axis").get<std::string>();
  if (j.contains("jobs")) cfg.jobs = j.at("jobs").get<int>();
  if (j.contains("hyperopt")) {
    cfg.hyperopt.n_init = j.at("hyperopt").value("n_init", 0);
    cfg.hyperopt.n_iter = j.at("hyperopt").value("n_iter", 0);
  }
  if (j.contains("wae_leak_free")) cfg.wae_leak_free = j.at("wae_leak_free").get<bool>();
  if (j.contains("eq2_population_std"))
    cfg.eq2_population_std = j.at("eq2_population_std").get<bool>();
  if (j.contains("deepsad")) {
    const json& d = j.at("deepsad");
    auto& hp = cfg.deepsad;
    hp.batch_size = d.value("batch_size", hp.batch_size);
    hp.lr_pretrain = d.value("lr_pretrain", hp.lr_pretrain);
    hp.lr = d.value("lr", hp.lr);
    hp.epochs_pretrain = d.value("epochs_pretrain", hp.epochs_pretrain);
    hp.epochs = d.value("epochs", hp.epochs);
    hp.nu = d.value("nu", hp.nu);
    hp.eta = d.value("eta", hp.eta);
    hp.lambda = d.value("lambda", hp.lambda);
    hp.eps = d.value("eps", hp.eps);
  }
  if (j.contains("dtcvae")) {
    const json& d = j.at("dtcvae");
    auto& hp = cfg.dtcvae;
    hp.hidden = d.value("hidden", hp.hidden);
    hp.batch_size = d.value("batch_size", hp.batch_size);
    hp.lr = d.value("lr", hp.lr);
    hp.epochs = d.value("epochs", hp.epochs);
    hp.alpha = d.value("alpha", hp.alpha);
    hp.beta = d.value("beta", hp.beta);
    hp.gamma = d.value("gamma", hp.gamma);
  }
  cfg.validate();
  return cfg;
}

inline RunConfig load_config(const fs::path& path) {
  return parse_config(json::parse(read_file(path)));
}

/// Dataset handle for the extract stage: on-disk reader when dataset.dir
/// exists, otherwise the in-process synthetic source.
inline std::unique_ptr<WaveformSource> open_source(const RunConfig& cfg) {
  if (!cfg.dataset_dir.empty() && fs::exists(cfg.dataset_dir / "manifest.txt"))
    return std::make_unique<FileWaveformSource>(cfg.dataset_dir);
  if (cfg.synth) return std::make_unique<SynthWaveformSource>(*cfg.synth);
  throw ConfigError("dataset not found: run the generate stage first or configure dataset.synth");
}

// ---------------------------------------------------------------------------
// Stage stamps
// ---------------------------------------------------------------------------

namespace detail {

inline uint64_t config_subset_hash(const RunConfig& cfg, std::initializer_list<const char*> keys,
                                   std::initializer_list<uint64_t> upstream = {}) {
  json sub;
  for (const char* k : keys)
    if (cfg.raw.contains(k)) sub[k] = cfg.raw.at(k);
  uint64_t h = fnv1a64(sub.dump());
  for (uint64_t u : upstream) h = fnv1a64(std::to_string(u), h);
  return h;
}

inline fs::path stamp_path(const RunConfig& cfg, const std::string& stage) {
  return cfg.out_dir / (stage + ".stamp");
}

/// Identity of the synthetic spec and payload encoding; the dataset's
/// location never enters a stamp, so identical runs in different roots
/// produce identical stamps.
inline uint64_t synth_identity_hash(const RunConfig& cfg) {
  json j;
  if (cfg.raw.contains("dataset") && cfg.raw.at("dataset").contains("synth"))
    j["synth"] = cfg.raw.at("dataset").at("synth");
  j["encoding"] = cfg.dataset_encoding;
  return fnv1a64(j.dump());
}

/// Dataset identity as seen by extract: spec identity plus the manifest
/// content when the dataset lives on disk.
inline uint64_t dataset_identity_hash(const RunConfig& cfg) {
  uint64_t h = synth_identity_hash(cfg);
  if (!cfg.dataset_dir.empty() && fs::exists(cfg.dataset_dir / "manifest.txt"))
    h = fnv1a64(read_file(cfg.dataset_dir / "manifest.txt"), h);
  return h;
}

inline bool stage_fresh(const RunConfig& cfg, const std::string& stage, uint64_t hash) {
  fs::path p = stamp_path(cfg, stage);
  if (!fs::exists(p)) return false;
  return trim(read_file(p)) == std::to_string(hash);
}

inline void write_stamp(const RunConfig& cfg, const std::string& stage, uint64_t hash) {
  write_file_atomic(stamp_path(cfg, stage), std::to_string(hash) + "\n");
}

inline uint64_t read_stamp(const RunConfig& cfg, const std::string& stage) {
  fs::path p = stamp_path(cfg, stage);
  if (!fs::exists(p))
    throw ConfigError("stage '" + stage + "' has not produced outputs yet; run it first");
  return static_cast<uint64_t>(std::stoull(trim(read_file(p))));
}

inline void log_stage(const std::string& stage, const std::string& msg) {
  std::cerr << "[" << stage << "] " << msg << "\n";
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Worker pool
// ---------------------------------------------------------------------------

/// Runs tasks on up to `jobs` threads; the first exception (by task index)
/// is rethrown after all workers finish.
inline void run_jobs(int jobs, std::vector<std::function<void()>> tasks) {
  if (tasks.empty()) return;
  if (jobs <= 1) {
    for (auto& t : tasks) t();
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::exception_ptr> errors(tasks.size());
  auto worker = [&] {
    while (true) {
      size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      try {
        tasks[i]();
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const int n = std::min<int>(jobs, static_cast<int>(tasks.size()));
  for (int i = 0; i < n; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// ---------------------------------------------------------------------------
// Fold training drivers
// ---------------------------------------------------------------------------

struct FoldContext {
  const FeatureTensor* tensor = nullptr;  // per-frequency scope
  Fold fold;
  double freq_khz = 0.0;
  std::vector<int> feature_ids;  // 1-based, selected for the run's SP method
  std::string time_axis = "cycles";
};

namespace detail {

inline std::vector<double> context_times(const FoldContext& ctx, int specimen_idx) {
  const auto& cycles = ctx.tensor->times[static_cast<size_t>(specimen_idx)];
  if (ctx.time_axis == "cycles") return cycles;
  std::vector<double> idx(cycles.size());
  for (size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<double>(i + 1);
  return idx;
}

/// Rows = timesteps, cols = selected features, at the context's frequency.
inline Eigen::MatrixXd context_rows(const FoldContext& ctx, int specimen_idx) {
  const int fi = ctx.tensor->freq_index(ctx.freq_khz);
  const auto& per_time = ctx.tensor->values[static_cast<size_t>(specimen_idx)][static_cast<size_t>(fi)];
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(per_time.size()),
                       static_cast<Eigen::Index>(ctx.feature_ids.size()));
  for (size_t t = 0; t < per_time.size(); ++t)
    for (size_t k = 0; k < ctx.feature_ids.size(); ++k)
      rows(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(k)) =
          per_time[t][static_cast<size_t>(ctx.feature_ids[k] - 1)];
  return rows;
}

inline bool is_train_specimen(const Fold& fold, int id) {
  return std::find(fold.train_specimens.begin(), fold.train_specimens.end(), id) !=
         fold.train_specimens.end();
}

struct FoldData {
  std::vector<int> specimen_ids;          // all, dataset order
  std::vector<int> specimen_idx;          // tensor indices
  std::vector<Eigen::MatrixXd> rows;      // per specimen, Z-scored
  std::vector<std::vector<double>> times; // per specimen
  std::vector<uint8_t> is_train;
  ZScoreNormalizer zscore;
};

inline FoldData prepare_fold_data(const FoldContext& ctx) {
  FoldData fd;
  std::vector<Eigen::MatrixXd> raw_rows;
  long total_rows = 0;
  for (size_t s = 0; s < ctx.tensor->specimen_ids.size(); ++s) {
    int id = ctx.tensor->specimen_ids[s];
    if (id != ctx.fold.test_specimen && !is_train_specimen(ctx.fold, id)) continue;
    fd.specimen_ids.push_back(id);
    fd.specimen_idx.push_back(static_cast<int>(s));
    fd.is_train.push_back(is_train_specimen(ctx.fold, id) ? 1 : 0);
    raw_rows.push_back(context_rows(ctx, static_cast<int>(s)));
    fd.times.push_back(context_times(ctx, static_cast<int>(s)));
    total_rows += raw_rows.back().rows();
  }
  if (fd.specimen_ids.empty()) throw ConfigError("fold covers no specimens in the dataset");

  Eigen::MatrixXd all(total_rows, raw_rows[0].cols());
  std::vector<uint8_t> mask(static_cast<size_t>(total_rows), 0);
  long at = 0;
  for (size_t s = 0; s < raw_rows.size(); ++s) {
    all.middleRows(at, raw_rows[s].rows()) = raw_rows[s];
    if (fd.is_train[s])
      std::fill(mask.begin() + at, mask.begin() + at + raw_rows[s].rows(), uint8_t{1});
    at += raw_rows[s].rows();
  }
  fd.zscore = ZScoreNormalizer::fit(all, mask);
  for (auto& r : raw_rows) fd.rows.push_back(fd.zscore.transform(r));
  return fd;
}

inline uint64_t run_stream_seed(uint64_t seed, const FoldContext& ctx) {
  return hash_mix(hash_mix(seed, static_cast<uint64_t>(ctx.fold.test_specimen)),
                  static_cast<uint64_t>(std::lround(ctx.freq_khz * 1000.0)));
}

}  // namespace detail

/// Trains Diversity-DeepSAD for one (fold, frequency, seed) and returns the
/// model plus normalized HI curves for every specimen in the fold.
inline std::pair<TrainedDeepSad, std::vector<HICurve>> train_deepsad_fold(
    const FoldContext& ctx, const DeepSadHyperparams& hp, uint64_t seed) {
  detail::FoldData fd = detail::prepare_fold_data(ctx);
  Rng rng(detail::run_stream_seed(seed, ctx));

  // Pooled training columns + per-specimen auxiliary labels.
  long n_train = 0;
  for (size_t s = 0; s < fd.rows.size(); ++s)
    if (fd.is_train[s]) n_train += fd.rows[s].rows();
  Matrix X(static_cast<Eigen::Index>(ctx.feature_ids.size()), n_train);
  AuxiliaryLabeling labeling;
  long at = 0;
  for (size_t s = 0; s < fd.rows.size(); ++s) {
    if (!fd.is_train[s]) continue;
    X.middleCols(at, fd.rows[s].rows()) = fd.rows[s].transpose();
    AuxiliaryLabeling part = make_labels(fd.times[s]);
    labeling.label.insert(labeling.label.end(), part.label.begin(), part.label.end());
    labeling.labeled.insert(labeling.labeled.end(), part.labeled.begin(), part.labeled.end());
    at += fd.rows[s].rows();
  }

  TrainedDeepSad model;
  model.hp = hp;
  model.seed = seed;
  model.feature_ids = ctx.feature_ids;
  model.freq_khz = ctx.freq_khz;
  model.fold_test_specimen = ctx.fold.test_specimen;
  model.zscore = fd.zscore;

  model.encoder = build_deepsad_encoder(static_cast<int>(ctx.feature_ids.size()), hp, rng);
  DenseNet decoder = build_mirror_decoder(model.encoder, rng);
  pretrain_autoencoder(model.encoder, decoder, X, hp, rng);
  model.center = init_center(model.encoder, X, hp.eps);
  train_deepsad(model.encoder, X, labeling, model.center, hp, rng);

  std::vector<double> train_hi;
  std::vector<std::vector<double>> raw_hi(fd.rows.size());
  for (size_t s = 0; s < fd.rows.size(); ++s) {
    raw_hi[s] = deepsad_raw_hi(model.encoder, model.center, fd.rows[s].transpose());
    if (fd.is_train[s]) train_hi.insert(train_hi.end(), raw_hi[s].begin(), raw_hi[s].end());
  }
  model.hi_minmax = MinMaxNormalizer::fit(train_hi);

  std::vector<HICurve> curves;
  for (size_t s = 0; s < fd.rows.size(); ++s) {
    HICurve c;
    c.specimen_id = fd.specimen_ids[s];
    c.source = fmt_double(ctx.freq_khz);
    c.times = fd.times[s];
    for (double v : raw_hi[s]) c.values.push_back(model.hi_minmax.transform(v));
    curves.push_back(std::move(c));
  }
  return {std::move(model), std::move(curves)};
}

/// Trains DTC-VAE for one (fold, frequency, seed); HI is the latent mean,
/// sign-oriented so degradation grows, then min-max normalized on training
/// statistics.
inline std::pair<TrainedDtcVae, std::vector<HICurve>> train_dtcvae_fold(
    const FoldContext& ctx, const DtcVaeHyperparams& hp, uint64_t seed) {
  detail::FoldData fd = detail::prepare_fold_data(ctx);
  Rng rng(detail::run_stream_seed(seed, ctx));

  long n_train = 0;
  for (size_t s = 0; s < fd.rows.size(); ++s)
    if (fd.is_train[s]) n_train += fd.rows[s].rows();
  Matrix X(static_cast<Eigen::Index>(ctx.feature_ids.size()), n_train);
  std::vector<int> specimen_of_col(static_cast<size_t>(n_train));
  long at = 0;
  for (size_t s = 0; s < fd.rows.size(); ++s) {
    if (!fd.is_train[s]) continue;
    X.middleCols(at, fd.rows[s].rows()) = fd.rows[s].transpose();
    std::fill(specimen_of_col.begin() + at, specimen_of_col.begin() + at + fd.rows[s].rows(),
              fd.specimen_ids[s]);
    at += fd.rows[s].rows();
  }

  TrainedDtcVae model;
  model.hp = hp;
  model.seed = seed;
  model.feature_ids = ctx.feature_ids;
  model.freq_khz = ctx.freq_khz;
  model.fold_test_specimen = ctx.fold.test_specimen;
  model.zscore = fd.zscore;

  model.net = build_vae(static_cast<int>(ctx.feature_ids.size()), hp.hidden, rng);
  Warnings warnings;
  DtcVaeTrainResult result = train_dtcvae(model.net, X, specimen_of_col, hp, rng, &warnings);
  model.rate = result.rate;
  model.posterior_collapse = result.posterior_collapse;

  // Latent mean per specimen; orient the 1-d axis so training end-of-life
  // sits above the healthy start before fitting the output normalizer.
  std::vector<Eigen::RowVectorXd> mu(fd.rows.size());
  double first_sum = 0.0, last_sum = 0.0;
  int n_tr = 0;
  for (size_t s = 0; s < fd.rows.size(); ++s) {
    mu[s] = dtcvae_latent_mean(model.net, fd.rows[s].transpose());
    if (fd.is_train[s]) {
      first_sum += mu[s][0];
      last_sum += mu[s][mu[s].size() - 1];
      ++n_tr;
    }
  }
  model.orientation_sign = last_sum / n_tr < first_sum / n_tr ? -1.0 : 1.0;

  std::vector<double> train_hi;
  for (size_t s = 0; s < fd.rows.size(); ++s) {
    if (!fd.is_train[s]) continue;
    for (Eigen::Index j = 0; j < mu[s].size(); ++j)
      train_hi.push_back(model.orientation_sign * mu[s][j]);
  }
  model.hi_minmax = MinMaxNormalizer::fit(train_hi);

  std::vector<HICurve> curves;
  for (size_t s = 0; s < fd.rows.size(); ++s) {
    HICurve c;
    c.specimen_id = fd.specimen_ids[s];
    c.source = fmt_double(ctx.freq_khz);
    c.times = fd.times[s];
    for (Eigen::Index j = 0; j < mu[s].size(); ++j)
      c.values.push_back(model.hi_minmax.transform(model.orientation_sign * mu[s][j]));
    curves.push_back(std::move(c));
  }
  return {std::move(model), std::move(curves)};
}

// ---------------------------------------------------------------------------
// Seed statistics
// ---------------------------------------------------------------------------

namespace detail {

inline SeedStat seed_stat(double value, const std::vector<double>& per_seed) {
  SeedStat s;
  s.value = value;
  if (per_seed.empty()) return s;
  double sum = 0.0;
  for (double v : per_seed) sum += v;
  s.seed_mean = sum / static_cast<double>(per_seed.size());
  double ss = 0.0;
  for (double v : per_seed) ss += (v - s.seed_mean) * (v - s.seed_mean);
  s.seed_std = std::sqrt(ss / static_cast<double>(per_seed.size()));
  return s;
}

}  // namespace detail

/// Criteria of the seed-averaged curves plus per-seed statistics.
inline CriteriaReport make_criteria_report(const std::vector<std::vector<HICurve>>& per_seed,
                                           int test_specimen, const CriteriaOptions& opts) {
  if (per_seed.empty()) throw ArgumentError("criteria report needs at least one seed");
  std::vector<HICurve> averaged;
  for (size_t s = 0; s < per_seed[0].size(); ++s) {
    std::vector<HICurve> across;
    for (const auto& seed_curves : per_seed) across.push_back(seed_curves[s]);
    averaged.push_back(seed_average(across));
  }
  auto to_set = [&](const std::vector<HICurve>& curves) {
    CurveSet set;
    set.curves = curves;
    for (size_t i = 0; i < curves.size(); ++i)
      if (curves[i].specimen_id == test_specimen) set.test_index = static_cast<int>(i);
    return set;
  };
  CriteriaValues avg = evaluate_criteria(to_set(averaged), opts);
  std::vector<double> mo, pr, tr, mot, prt, fa, ft;
  for (const auto& seed_curves : per_seed) {
    CriteriaValues v = evaluate_criteria(to_set(seed_curves), opts);
    mo.push_back(v.mo);
    pr.push_back(v.pr);
    tr.push_back(v.tr);
    mot.push_back(v.mo_test);
    prt.push_back(v.pr_test);
    fa.push_back(v.f_all);
    ft.push_back(v.f_test);
  }
  CriteriaReport r;
  r.mo = detail::seed_stat(avg.mo, mo);
  r.pr = detail::seed_stat(avg.pr, pr);
  r.tr = detail::seed_stat(avg.tr, tr);
  r.mo_test = detail::seed_stat(avg.mo_test, mot);
  r.pr_test = detail::seed_stat(avg.pr_test, prt);
  r.f_all = detail::seed_stat(avg.f_all, fa);
  r.f_test = detail::seed_stat(avg.f_test, ft);
  r.percent_of_3 = 100.0 * avg.f_all / 3.0;
  return r;
}

// ---------------------------------------------------------------------------
// Stages
// ---------------------------------------------------------------------------

/// generate: materialize the configured synthetic dataset on disk.
inline void cmd_generate(const RunConfig& cfg) {
  if (!cfg.synth) throw ConfigError("generate: config has no dataset.synth block");
  if (cfg.dataset_dir.empty())
    throw ConfigError("generate: config has no dataset.dir to write into");
  uint64_t h = detail::synth_identity_hash(cfg);
  if (detail::stage_fresh(cfg, "generate", h) && fs::exists(cfg.dataset_dir / "manifest.txt")) {
    detail::log_stage("generate", "up to date, skipping");
    return;
  }
  detail::log_stage("generate", "writing dataset to " + cfg.dataset_dir.string());
  generate_dataset(*cfg.synth, cfg.dataset_dir, cfg.dataset_encoding);
  detail::write_stamp(cfg, "generate", h);
}

inline fs::path features_by_freq_path(const RunConfig& cfg) {
  return cfg.out_dir / "features" / "features_by_freq.tsv";
}
inline fs::path features_rank_path(const RunConfig& cfg) {
  return cfg.out_dir / "features" / "features_rank.tsv";
}
inline fs::path meta_path(const RunConfig& cfg) { return cfg.out_dir / "features" / "meta.txt"; }

/// extract: path-averaged feature tensors (per-frequency and rank scope).
inline void cmd_extract(const RunConfig& cfg) {
  uint64_t h = detail::dataset_identity_hash(cfg);
  if (detail::stage_fresh(cfg, "extract", h) && fs::exists(features_by_freq_path(cfg))) {
    detail::log_stage("extract", "up to date, skipping");
    return;
  }
  auto src = open_source(cfg);
  const DatasetMeta& meta = src->meta();
  long total_blocks = 0;
  for (const auto& s : meta.specimens)
    total_blocks += static_cast<long>(meta.frequencies_khz.size()) * s.timesteps();
  detail::log_stage("extract", "extracting features from " + std::to_string(total_blocks) +
                                   " measurement blocks");
  ExtractParams params;
  if (meta.samples < params.stft_win) {
    // Short signals: shrink the window, keep the half-window overlap.
    params.stft_win = meta.samples;
    params.stft_overlap = params.stft_win / 2;
  }
  std::atomic<long> done{0};
  FeatureTensor tensor = extract_all(*src, params, [&] {
    long d = ++done;
    if (d % 50 == 0 || d == total_blocks)
      detail::log_stage("extract", std::to_string(d) + "/" + std::to_string(total_blocks));
  });
  write_feature_tensor(features_by_freq_path(cfg), tensor);
  write_feature_tensor(features_rank_path(cfg), average_frequencies(tensor));
  // Dataset geometry travels with the features so later stages need no
  // waveform access.
  DatasetManifest mirror;
  mirror.meta = meta;
  write_file_atomic(meta_path(cfg), manifest_to_text(mirror));
  detail::write_stamp(cfg, "extract", h);
}

namespace detail {

inline DatasetMeta load_meta(const RunConfig& cfg) {
  return manifest_from_text(read_file(meta_path(cfg))).meta;
}

}  // namespace detail

inline fs::path score_table_path(const RunConfig& cfg) {
  return cfg.out_dir / "rank" / "feature_scores.txt";
}

/// rank: fitness per feature on the frequency-averaged tensor, benchmark
/// selection, per-method summary.
inline void cmd_rank(const RunConfig& cfg) {
  uint64_t up = detail::read_stamp(cfg, "extract");
  uint64_t h = detail::config_subset_hash(cfg, {"eq2_population_std", "time_axis"}, {up});
  if (detail::stage_fresh(cfg, "rank", h) && fs::exists(score_table_path(cfg))) {
    detail::log_stage("rank", "up to date, skipping");
    return;
  }
  DatasetMeta meta = detail::load_meta(cfg);
  FeatureTensor rank_tensor = read_feature_tensor(features_rank_path(cfg), meta, true);
  if (cfg.time_axis == "index") {
    for (auto& times : rank_tensor.times) {
      for (size_t i = 0; i < times.size(); ++i) times[i] = static_cast<double>(i + 1);
    }
  }
  Warnings warnings;
  FeatureScoreTable table = rank_and_select(rank_tensor, cfg.criteria_options(), &warnings);
  for (const auto& m : warnings.messages) detail::log_stage("rank", "warning: " + m);
  write_score_table(score_table_path(cfg), table, rank_tensor.layout);
  std::ostringstream msg;
  msg << "benchmark " << fmt_double(table.benchmark) << ";";
  for (const auto& ms : table.methods)
    msg << " " << sp_method_name(ms.method) << " " << fmt_double(ms.mean_before) << "->"
        << fmt_double(ms.mean_after) << " (" << ms.selected_count << " kept)";
  detail::log_stage("rank", msg.str());
  detail::write_stamp(cfg, "rank", h);
}

// Layout helpers for the training stage outputs.
inline fs::path fold_dir(const RunConfig& cfg, const std::string& stage, int fold_test) {
  return cfg.out_dir / stage / cfg.run_tag() / ("fold" + std::to_string(fold_test));
}
inline fs::path curves_path(const RunConfig& cfg, int fold_test, double freq, uint64_t seed) {
  return fold_dir(cfg, "train", fold_test) /
         ("f" + std::to_string(std::lround(freq)) + "_seed" + std::to_string(seed) +
          ".curves.tsv");
}
inline fs::path model_path(const RunConfig& cfg, int fold_test, double freq, uint64_t seed) {
  return fold_dir(cfg, "train", fold_test) /
         ("f" + std::to_string(std::lround(freq)) + "_seed" + std::to_string(seed) +
          ".model.json");
}

namespace detail {

struct RunScope {
  std::vector<Fold> folds;
  std::vector<double> freqs;
};

inline RunScope run_scope(const RunConfig& cfg, const DatasetMeta& meta) {
  RunScope scope;
  FoldPlan plan = build_folds(meta.specimen_ids());
  for (const auto& f : plan.folds)
    if (cfg.folds.empty() ||
        std::find(cfg.folds.begin(), cfg.folds.end(), f.test_specimen) != cfg.folds.end())
      scope.folds.push_back(f);
  for (double f : meta.frequencies_khz)
    if (cfg.frequencies.empty() ||
        std::find(cfg.frequencies.begin(), cfg.frequencies.end(), f) != cfg.frequencies.end())
      scope.freqs.push_back(f);
  if (scope.folds.empty()) throw ConfigError("fold subset matches no specimen");
  if (scope.freqs.empty()) throw ConfigError("frequency subset matches no dataset frequency");
  return scope;
}

inline std::vector<int> selected_feature_ids(const RunConfig& cfg, const FeatureLayout& layout) {
  FeatureScoreTable table = read_score_table(score_table_path(cfg));
  SpMethod method = sp_method_from_name(cfg.sp_method);
  std::vector<int> ids;
  for (int id : layout.ids_for(method))
    if (table.scores.at(static_cast<size_t>(id - 1)).selected) ids.push_back(id);
  if (ids.empty()) {
    // Degenerate ranking (or an SP method whose features all score below the
    // benchmark): fall back to the whole block so training stays possible.
    ids = layout.ids_for(method);
    log_stage("train", "warning: no " + cfg.sp_method +
                           " feature beat the benchmark; using the full block");
  }
  return ids;
}

inline SearchSpace deepsad_search_space() {
  SearchSpace s;
  s.dims = {{"batch_size", 50, 150, true},
            {"lr_pretrain", 1e-4, 1e-3, false},
            {"lr", 1e-4, 1e-3, false},
            {"epochs_pretrain", 5, 20, true},
            {"epochs", 50, 200, true}};
  return s;
}

inline SearchSpace dtcvae_search_space() {
  SearchSpace s;
  s.dims = {{"hidden", 40, 60, true},   {"batch_size", 75, 95, true},
            {"lr", 1e-3, 1e-2, false},  {"epochs", 500, 600, true},
            {"alpha", 1.4, 1.8, false}, {"beta", 2.6, 3.0, false},
            {"gamma", 0.05, 0.1, false}};
  return s;
}

inline DeepSadHyperparams deepsad_from_point(const DeepSadHyperparams& base,
                                             const std::vector<double>& x) {
  DeepSadHyperparams hp = base;
  hp.batch_size = static_cast<int>(x[0]);
  hp.lr_pretrain = x[1];
  hp.lr = x[2];
  hp.epochs_pretrain = static_cast<int>(x[3]);
  hp.epochs = static_cast<int>(x[4]);
  return hp;
}

inline DtcVaeHyperparams dtcvae_from_point(const DtcVaeHyperparams& base,
                                           const std::vector<double>& x) {
  DtcVaeHyperparams hp = base;
  hp.hidden = static_cast<int>(x[0]);
  hp.batch_size = static_cast<int>(x[1]);
  hp.lr = x[2];
  hp.epochs = static_cast<int>(x[3]);
  hp.alpha = x[4];
  hp.beta = x[5];
  hp.gamma = x[6];
  return hp;
}

inline double fold_f_all(const std::vector<HICurve>& curves, int test_specimen,
                         const CriteriaOptions& opts) {
  CurveSet set;
  set.curves = curves;
  for (size_t i = 0; i < curves.size(); ++i)
    if (curves[i].specimen_id == test_specimen) set.test_index = static_cast<int>(i);
  return evaluate_criteria(set, opts).f_all;
}

}  // namespace detail

/// train: per (fold, frequency) optionally run the Bayesian search with the
/// first seed, then train every configured seed with the frozen
/// hyperparameters. Jobs parallelize across (fold, frequency).
inline void cmd_train(const RunConfig& cfg) {
  uint64_t up_e = detail::read_stamp(cfg, "extract");
  uint64_t up_r = detail::read_stamp(cfg, "rank");
  uint64_t h = detail::config_subset_hash(
      cfg, {"model", "sp_method", "frequencies", "folds", "seeds", "time_axis", "hyperopt",
            "deepsad", "dtcvae"},
      {up_e, up_r});
  if (detail::stage_fresh(cfg, "train", h)) {
    detail::log_stage("train", "up to date, skipping");
    return;
  }
  DatasetMeta meta = detail::load_meta(cfg);
  FeatureTensor tensor = read_feature_tensor(features_by_freq_path(cfg), meta, false);
  detail::RunScope scope = detail::run_scope(cfg, meta);
  std::vector<int> feature_ids = detail::selected_feature_ids(cfg, tensor.layout);
  detail::log_stage("train", cfg.run_tag() + ": " + std::to_string(scope.folds.size()) +
                                 " folds x " + std::to_string(scope.freqs.size()) +
                                 " frequencies x " + std::to_string(cfg.seeds.size()) + " seeds, " +
                                 std::to_string(feature_ids.size()) + " features");

  std::mutex log_mutex;
  std::vector<std::function<void()>> tasks;
  for (const auto& fold : scope.folds) {
    for (double freq : scope.freqs) {
      tasks.push_back([&, fold, freq] {
        FoldContext ctx{&tensor, fold, freq, feature_ids, cfg.time_axis};
        const CriteriaOptions opts = cfg.criteria_options();

        DeepSadHyperparams ds_hp = cfg.deepsad;
        DtcVaeHyperparams vae_hp = cfg.dtcvae;
        if (cfg.hyperopt.n_init > 0) {
          // Objective: F_all of a single-seed training run (5-seed averaging
          // happens only after the hyperparameters are frozen).
          uint64_t search_seed = detail::run_stream_seed(cfg.seeds[0], ctx);
          SearchSpace space = cfg.model == "deepsad" ? detail::deepsad_search_space()
                                                     : detail::dtcvae_search_space();
          auto objective = [&](const std::vector<double>& x) {
            if (cfg.model == "deepsad") {
              auto hp = detail::deepsad_from_point(cfg.deepsad, x);
              auto [model, curves] = train_deepsad_fold(ctx, hp, cfg.seeds[0]);
              return detail::fold_f_all(curves, fold.test_specimen, opts);
            }
            auto hp = detail::dtcvae_from_point(cfg.dtcvae, x);
            auto [model, curves] = train_dtcvae_fold(ctx, hp, cfg.seeds[0]);
            return detail::fold_f_all(curves, fold.test_specimen, opts);
          };
          fs::path trace_path =
              fold_dir(cfg, "train", fold.test_specimen) /
              ("f" + std::to_string(std::lround(freq)) + "_hyperopt_trace.tsv");
          std::vector<Observation> prior;
          if (fs::exists(trace_path)) prior = read_trace(trace_path, space);
          OptimizeResult res = optimize(space, objective, cfg.hyperopt, search_seed, prior);
          write_trace(trace_path, space, res.trace);
          if (cfg.model == "deepsad") ds_hp = detail::deepsad_from_point(cfg.deepsad, res.best_x);
          else vae_hp = detail::dtcvae_from_point(cfg.dtcvae, res.best_x);
        }

        int degenerate_columns = 0;
        for (uint64_t seed : cfg.seeds) {
          if (cfg.model == "deepsad") {
            auto [model, curves] = train_deepsad_fold(ctx, ds_hp, seed);
            save_model(model_path(cfg, fold.test_specimen, freq, seed), model);
            write_hi_curves(curves_path(cfg, fold.test_specimen, freq, seed), curves);
            for (uint8_t d : model.zscore.degenerate) degenerate_columns += d;
          } else {
            auto [model, curves] = train_dtcvae_fold(ctx, vae_hp, seed);
            save_model(model_path(cfg, fold.test_specimen, freq, seed), model);
            write_hi_curves(curves_path(cfg, fold.test_specimen, freq, seed), curves);
            for (uint8_t d : model.zscore.degenerate) degenerate_columns += d;
          }
        }
        std::lock_guard<std::mutex> lock(log_mutex);
        if (degenerate_columns > 0)
          detail::log_stage("train", "warning: fold " + std::to_string(fold.test_specimen) +
                                         " f" + fmt_double(freq) +
                                         " has zero-variance feature columns (sigma set to 1)");
        detail::log_stage("train", "fold " + std::to_string(fold.test_specimen) + " f" +
                                       fmt_double(freq) + " done");
      });
    }
  }
  run_jobs(cfg.jobs, std::move(tasks));
  detail::write_stamp(cfg, "train", h);
}

inline fs::path fused_mean_path(const RunConfig& cfg, int fold_test) {
  return fold_dir(cfg, "fuse", fold_test) / "fused_mean.curves.tsv";
}
inline fs::path fused_seed_path(const RunConfig& cfg, int fold_test, uint64_t seed) {
  return fold_dir(cfg, "fuse", fold_test) / ("fused_seed" + std::to_string(seed) + ".curves.tsv");
}
inline fs::path fusion_weights_path(const RunConfig& cfg, int fold_test) {
  return fold_dir(cfg, "fuse", fold_test) / "weights.txt";
}

/// fuse: seed-average each frequency, weight by its all-specimen F_all
/// (training-only under wae_leak_free), fuse the averaged curves and each
/// seed's curves with the same weights.
inline void cmd_fuse(const RunConfig& cfg) {
  uint64_t up = detail::read_stamp(cfg, "train");
  uint64_t h = detail::config_subset_hash(cfg, {"wae_leak_free", "eq2_population_std"}, {up});
  if (detail::stage_fresh(cfg, "fuse", h)) {
    detail::log_stage("fuse", "up to date, skipping");
    return;
  }
  DatasetMeta meta = detail::load_meta(cfg);
  detail::RunScope scope = detail::run_scope(cfg, meta);
  const CriteriaOptions opts = cfg.criteria_options();

  for (const auto& fold : scope.folds) {
    std::vector<FrequencyBundle> mean_bundles;
    // per seed, per frequency curves, aligned with scope.freqs
    std::vector<std::vector<std::vector<HICurve>>> seed_curves(cfg.seeds.size());
    for (double freq : scope.freqs) {
      std::vector<std::vector<HICurve>> per_seed;
      for (size_t si = 0; si < cfg.seeds.size(); ++si) {
        per_seed.push_back(read_hi_curves(curves_path(cfg, fold.test_specimen, freq,
                                                      cfg.seeds[si])));
        seed_curves[si].push_back(per_seed.back());
      }
      FrequencyBundle bundle;
      bundle.freq_khz = freq;
      for (size_t s = 0; s < per_seed[0].size(); ++s) {
        std::vector<HICurve> across;
        for (const auto& sc : per_seed) across.push_back(sc[s]);
        bundle.curves.push_back(seed_average(across));
      }
      // Fitness weight of the seed-averaged curves.
      std::vector<HICurve> weight_curves;
      for (const auto& c : bundle.curves)
        if (!cfg.wae_leak_free || c.specimen_id != fold.test_specimen)
          weight_curves.push_back(c);
      CurveSet set;
      set.curves = weight_curves;
      bundle.weight = evaluate_criteria(set, opts).f_all;
      mean_bundles.push_back(std::move(bundle));
    }

    FusionWeights weights;
    std::vector<HICurve> fused_mean = wae_fuse(mean_bundles, &weights);
    write_hi_curves(fused_mean_path(cfg, fold.test_specimen), fused_mean);
    for (size_t si = 0; si < cfg.seeds.size(); ++si) {
      std::vector<FrequencyBundle> bundles;
      for (size_t fi = 0; fi < scope.freqs.size(); ++fi)
        bundles.push_back(FrequencyBundle{scope.freqs[fi], seed_curves[si][fi], 0.0});
      write_hi_curves(fused_seed_path(cfg, fold.test_specimen, cfg.seeds[si]),
                      fuse_with_weights(bundles, weights));
    }

    TsvBuilder wtsv({"freq_khz", "weight_raw", "weight_normalized"});
    for (size_t fi = 0; fi < scope.freqs.size(); ++fi)
      wtsv.row({fmt_double(scope.freqs[fi]), fmt_double(weights.raw[fi]),
                fmt_double(weights.normalized[fi])});
    wtsv.write(fusion_weights_path(cfg, fold.test_specimen));
  }
  detail::log_stage("fuse", "fused " + std::to_string(scope.folds.size()) + " folds over " +
                                std::to_string(scope.freqs.size()) + " frequencies");
  detail::write_stamp(cfg, "fuse", h);
}

inline fs::path criteria_report_path(const RunConfig& cfg, int fold_test,
                                     const std::string& source) {
  return fold_dir(cfg, "eval", fold_test) / ("criteria_" + source + ".txt");
}

/// evaluate: criteria reports per (fold, frequency) and for the fusion,
/// recomputed from the persisted curve files.
inline void cmd_evaluate(const RunConfig& cfg) {
  uint64_t up_t = detail::read_stamp(cfg, "train");
  uint64_t up_f = detail::read_stamp(cfg, "fuse");
  uint64_t h = detail::config_subset_hash(cfg, {"eq2_population_std"}, {up_t, up_f});
  if (detail::stage_fresh(cfg, "evaluate", h)) {
    detail::log_stage("evaluate", "up to date, skipping");
    return;
  }
  DatasetMeta meta = detail::load_meta(cfg);
  detail::RunScope scope = detail::run_scope(cfg, meta);
  const CriteriaOptions opts = cfg.criteria_options();

  for (const auto& fold : scope.folds) {
    for (double freq : scope.freqs) {
      std::vector<std::vector<HICurve>> per_seed;
      for (uint64_t seed : cfg.seeds)
        per_seed.push_back(read_hi_curves(curves_path(cfg, fold.test_specimen, freq, seed)));
      CriteriaReport report = make_criteria_report(per_seed, fold.test_specimen, opts);
      write_file_atomic(
          criteria_report_path(cfg, fold.test_specimen,
                               "f" + std::to_string(std::lround(freq))),
          criteria_report_to_text(report));
    }
    std::vector<std::vector<HICurve>> per_seed;
    for (uint64_t seed : cfg.seeds)
      per_seed.push_back(read_hi_curves(fused_seed_path(cfg, fold.test_specimen, seed)));
    CriteriaReport report = make_criteria_report(per_seed, fold.test_specimen, opts);
    write_file_atomic(criteria_report_path(cfg, fold.test_specimen, "fused"),
                      criteria_report_to_text(report));
  }
  detail::log_stage("evaluate", "criteria reports written");
  detail::write_stamp(cfg, "evaluate", h);
}

namespace detail {

inline std::string table_cell(const SeedStat& s) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f (+- %.3f)", s.value, s.seed_std);
  return buf;
}

}  // namespace detail

/// report: fold x frequency tables of F_all and F_test, plot data and SVG
/// line charts of the seed-averaged HI curves.
inline void cmd_report(const RunConfig& cfg) {
  uint64_t up = detail::read_stamp(cfg, "evaluate");
  uint64_t h = detail::config_subset_hash(cfg, {"model", "sp_method"}, {up});
  if (detail::stage_fresh(cfg, "report", h)) {
    detail::log_stage("report", "up to date, skipping");
    return;
  }
  DatasetMeta meta = detail::load_meta(cfg);
  detail::RunScope scope = detail::run_scope(cfg, meta);
  fs::path rep_dir = cfg.out_dir / "report" / cfg.run_tag();

  std::vector<std::string> sources;
  for (double f : scope.freqs) sources.push_back("f" + std::to_string(std::lround(f)));
  sources.push_back("fused");

  for (const char* which : {"f_all", "f_test"}) {
    std::vector<std::string> header = {"source"};
    for (const auto& fold : scope.folds)
      header.push_back("fold" + std::to_string(fold.test_specimen));
    TsvBuilder tsv(header);
    for (const auto& source : sources) {
      std::vector<std::string> row = {source};
      for (const auto& fold : scope.folds) {
        CriteriaReport r = criteria_report_from_text(
            read_file(criteria_report_path(cfg, fold.test_specimen, source)));
        row.push_back(detail::table_cell(std::string(which) == "f_all" ? r.f_all : r.f_test));
      }
      tsv.row(row);
    }
    tsv.write(rep_dir / (std::string(which) + "_table.tsv"));
  }

  // Seed-averaged curves: plot data + SVG per (fold, source).
  for (const auto& fold : scope.folds) {
    for (size_t fi = 0; fi <= scope.freqs.size(); ++fi) {
      bool fused = fi == scope.freqs.size();
      std::vector<std::vector<HICurve>> per_seed;
      for (uint64_t seed : cfg.seeds)
        per_seed.push_back(fused
                               ? read_hi_curves(fused_seed_path(cfg, fold.test_specimen, seed))
                               : read_hi_curves(curves_path(cfg, fold.test_specimen,
                                                            scope.freqs[fi], seed)));
      std::vector<HICurve> averaged;
      for (size_t s = 0; s < per_seed[0].size(); ++s) {
        std::vector<HICurve> across;
        for (const auto& sc : per_seed) across.push_back(sc[s]);
        averaged.push_back(seed_average(across));
      }
      std::string source = fused ? "fused" : sources[fi];
      std::string stem = "hi_fold" + std::to_string(fold.test_specimen) + "_" + source;
      write_hi_curves(rep_dir / (stem + ".tsv"), averaged);
      write_svg_chart(rep_dir / (stem + ".svg"), averaged,
                      cfg.run_tag() + " " + source + ", test specimen " +
                          std::to_string(fold.test_specimen));
    }
  }
  detail::log_stage("report", "tables and charts written to " + rep_dir.string());
  detail::write_stamp(cfg, "report", h);
}

/// Debug dump of the processed representations of one measurement: full
/// spectrum, analytic-signal envelope, and IMFs of a chosen path, as
/// delimited text under out_dir/inspect/.
inline void cmd_inspect(const RunConfig& cfg, int specimen, double freq_khz, int timestep,
                        int path_row) {
  auto src = open_source(cfg);
  Eigen::MatrixXd block = src->block(specimen, freq_khz, timestep);
  if (path_row < 0 || path_row >= block.rows())
    throw ConfigError("inspect: path row out of range (0.." +
                      std::to_string(block.rows() - 1) + ")");
  std::vector<double> x(static_cast<size_t>(block.cols()));
  for (Eigen::Index c = 0; c < block.cols(); ++c) x[static_cast<size_t>(c)] = block(path_row, c);

  std::ostringstream stem;
  stem << "s" << specimen << "_f" << std::lround(freq_khz) << "_t" << timestep << "_p"
       << path_row;
  fs::path dir = cfg.out_dir / "inspect";

  Spectrum spec = fft(x, src->meta().sample_rate);
  TsvBuilder spec_tsv({"bin", "freq_hz", "real", "imag", "magnitude"});
  for (size_t k = 0; k < spec.size(); ++k)
    spec_tsv.row({std::to_string(k), fmt_double(static_cast<double>(k) * spec.bin_resolution()),
                  fmt_double(spec.bins[k].real()), fmt_double(spec.bins[k].imag()),
                  fmt_double(std::abs(spec.bins[k]))});
  spec_tsv.write(dir / (stem.str() + "_spectrum.tsv"));

  auto env = hilbert_analytic(x).envelope();
  TsvBuilder env_tsv({"sample", "value", "envelope"});
  for (size_t i = 0; i < x.size(); ++i)
    env_tsv.row({std::to_string(i), fmt_double(x[i]), fmt_double(env[i])});
  env_tsv.write(dir / (stem.str() + "_envelope.tsv"));

  ImfDecomposition dec = emd(x);
  std::vector<std::string> header = {"sample"};
  for (size_t k = 0; k < dec.imfs.size(); ++k) header.push_back("imf" + std::to_string(k + 1));
  header.push_back("residual");
  TsvBuilder imf_tsv(header);
  for (size_t i = 0; i < x.size(); ++i) {
    std::vector<std::string> row = {std::to_string(i)};
    for (const auto& imf : dec.imfs) row.push_back(fmt_double(imf[i]));
    row.push_back(fmt_double(dec.residual[i]));
    imf_tsv.row(row);
  }
  imf_tsv.write(dir / (stem.str() + "_imfs.tsv"));
  detail::log_stage("inspect", "wrote " + (dir / stem.str()).string() + "_{spectrum,envelope,imfs}.tsv");
}

inline void run_all_stages(const RunConfig& cfg) {
  if (cfg.synth && !cfg.dataset_dir.empty()) cmd_generate(cfg);
  cmd_extract(cfg);
  cmd_rank(cfg);
  cmd_train(cfg);
  cmd_fuse(cfg);
  cmd_evaluate(cfg);
  cmd_report(cfg);
}

inline void run_stage(const RunConfig& cfg, const std::string& stage) {
  if (stage == "generate") cmd_generate(cfg);
  else if (stage == "extract") cmd_extract(cfg);
  else if (stage == "rank") cmd_rank(cfg);
  else if (stage == "train") cmd_train(cfg);
  else if (stage == "fuse") cmd_fuse(cfg);
  else if (stage == "evaluate") cmd_evaluate(cfg);
  else if (stage == "report") cmd_report(cfg);
  else if (stage == "all") run_all_stages(cfg);
  else throw ConfigError("unknown stage '" + stage + "'");
}

}  // namespace gwhi

#endif  // GWHI_PIPELINE_HPP
