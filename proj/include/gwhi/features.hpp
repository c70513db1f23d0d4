// include/gwhi/features.hpp

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
// Multi-domain statistical features per (specimen, frequency, timestep):
// 19 time-domain features on the raw signal and on the Hilbert envelope and
// first IMF, 14 frequency-domain features on the one-sided FFT magnitudes,
// and 4 per STFT window. Path-averaged extraction, fitness ranking and
// above-benchmark selection.

#ifndef GWHI_FEATURES_HPP
#define GWHI_FEATURES_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "gwhi/criteria.hpp"
#include "gwhi/data.hpp"
#include "gwhi/sigproc.hpp"

namespace gwhi {

// ---------------------------------------------------------------------------
// Registry
// ---------------------------------------------------------------------------

enum class SpMethod { Raw, Fft, Ht, Emd, Stft };

inline const char* sp_method_name(SpMethod m) {
  switch (m) {
    case SpMethod::Raw: return "raw";
    case SpMethod::Fft: return "fft";
    case SpMethod::Ht: return "ht";
    case SpMethod::Emd: return "emd";
    case SpMethod::Stft: return "stft";
  }
  return "?";
}

inline SpMethod sp_method_from_name(const std::string& s) {
  if (s == "raw") return SpMethod::Raw;
  if (s == "fft") return SpMethod::Fft;
  if (s == "ht") return SpMethod::Ht;
  if (s == "emd") return SpMethod::Emd;
  if (s == "stft") return SpMethod::Stft;
  throw ConfigError("unknown sp method '" + s + "' (expected raw|fft|ht|emd|stft)");
}

struct FeatureInfo {
  int id = 0;  // 1-based, dense
  SpMethod method = SpMethod::Raw;
  std::string name;
};

/// Dense feature-id layout. Slots 1-19 raw time domain, 20-33 FFT, 34-52 HT,
/// 53-71 EMD, then 4 per STFT window. With 17 windows this is the 139-slot
/// layout; the window count follows the actual signal length.
struct FeatureLayout {
  int stft_windows = 0;
  std::vector<FeatureInfo> registry;

  int total() const { return 71 + 4 * stft_windows; }

  std::vector<int> ids_for(SpMethod m) const {
    std::vector<int> ids;
    for (const auto& info : registry)
      if (info.method == m) ids.push_back(info.id);
    return ids;
  }

  const FeatureInfo& info(int id) const {
    if (id < 1 || id > total()) throw ArgumentError("feature id out of range");
    return registry[static_cast<size_t>(id - 1)];
  }
};

inline const std::vector<std::string>& time_feature_names() {
  static const std::vector<std::string> names = {
      "mean",          "std",        "root_amplitude", "rms",        "rss",
      "peak",          "skewness",   "kurtosis",       "crest",      "clearance",
      "shape",         "impulse",    "max_min",        "cm3",        "cm4",
      "cm5",           "cm6",        "fm4",            "median"};
  return names;
}

inline FeatureLayout make_layout(int stft_windows) {
  FeatureLayout layout;
  layout.stft_windows = stft_windows;
  int id = 1;
  for (const auto& n : time_feature_names()) layout.registry.push_back({id++, SpMethod::Raw, n});
  for (int k = 1; k <= 14; ++k)
    layout.registry.push_back({id++, SpMethod::Fft, "s" + std::to_string(k)});
  for (const auto& n : time_feature_names()) layout.registry.push_back({id++, SpMethod::Ht, n});
  for (const auto& n : time_feature_names()) layout.registry.push_back({id++, SpMethod::Emd, n});
  static const char* tf_names[4] = {"mean", "std", "skew", "kurt"};
  for (int w = 1; w <= stft_windows; ++w)
    for (const char* n : tf_names)
      layout.registry.push_back({id++, SpMethod::Stft, "w" + std::to_string(w) + "_" + n});
  return layout;
}

// ---------------------------------------------------------------------------
// Per-signal feature blocks
// ---------------------------------------------------------------------------

/// Values plus a per-slot degeneracy flag (division by zero spread and
/// friends are replaced by 0 and flagged, never propagated as NaN).
struct FeatureBlock {
  std::vector<double> values;
  std::vector<uint8_t> flagged;

  void push(double v, bool flag = false) {
    values.push_back(v);
    flagged.push_back(flag ? 1 : 0);
  }

  void append(const FeatureBlock& other) {
    values.insert(values.end(), other.values.begin(), other.values.end());
    flagged.insert(flagged.end(), other.flagged.begin(), other.flagged.end());
  }
};

namespace detail {

/// 0 with a flag whenever the expression is not finite.
inline void push_guarded(FeatureBlock& out, double v) {
  if (std::isfinite(v)) out.push(v);
  else out.push(0.0, true);
}

}  // namespace detail

/// The 19 time-domain features. Sample (n-1) standard deviation; central
/// moments use n. Slot 19 is the sample median.
inline FeatureBlock time_features(std::span<const double> x) {
  if (x.size() < 2) throw ArgumentError("time_features: need length >= 2");
  const double n = static_cast<double>(x.size());
  double sum = 0.0, abs_sum = 0.0, sq_sum = 0.0, root_sum = 0.0;
  double mx = x[0], mn = x[0];
  for (double v : x) {
    sum += v;
    abs_sum += std::abs(v);
    sq_sum += v * v;
    root_sum += std::sqrt(std::abs(v));
    mx = std::max(mx, v);
    mn = std::min(mn, v);
  }
  const double mean = sum / n;
  double cm2 = 0.0, cm3 = 0.0, cm4 = 0.0, cm5 = 0.0, cm6 = 0.0;
  for (double v : x) {
    double d = v - mean;
    double d2 = d * d;
    cm2 += d2;
    cm3 += d2 * d;
    cm4 += d2 * d2;
    cm5 += d2 * d2 * d;
    cm6 += d2 * d2 * d2;
  }
  const double sd = std::sqrt(cm2 / (n - 1.0));
  const double root = (root_sum / n) * (root_sum / n);
  const double rms = std::sqrt(sq_sum / n);
  const double rss = std::sqrt(sq_sum);
  const double peak = std::max(std::abs(mx), std::abs(mn));

  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  const size_t h = sorted.size() / 2;
  const double median =
      sorted.size() % 2 ? sorted[h] : 0.5 * (sorted[h - 1] + sorted[h]);

  FeatureBlock out;
  out.push(mean);
  out.push(sd);
  out.push(root);
  out.push(rms);
  out.push(rss);
  out.push(peak);
  detail::push_guarded(out, cm3 / ((n - 1.0) * sd * sd * sd));        // skewness
  detail::push_guarded(out, cm4 / ((n - 1.0) * sd * sd * sd * sd));   // kurtosis
  detail::push_guarded(out, peak / rms);                              // crest
  detail::push_guarded(out, peak / root);                             // clearance
  detail::push_guarded(out, rms / (abs_sum / n));                     // shape
  detail::push_guarded(out, peak / (abs_sum / n));                    // impulse
  out.push(mx - mn);
  out.push(cm3 / n);
  out.push(cm4 / n);
  out.push(cm5 / n);
  out.push(cm6 / n);
  detail::push_guarded(out, (cm4 / n) / (sd * sd * sd * sd));         // FM4
  out.push(median);
  return out;
}

/// The 14 frequency-domain features S1..S14 on a one-sided magnitude
/// spectrum s(f) with bin frequencies f_k.
inline FeatureBlock freq_features(std::span<const double> mags, std::span<const double> freqs) {
  if (mags.size() < 2) throw ArgumentError("freq_features: need >= 2 bins");
  if (mags.size() != freqs.size()) throw ArgumentError("freq_features: bins/freqs mismatch");
  for (double m : mags)
    if (m < 0.0) throw ArgumentError("freq_features: magnitudes must be >= 0");
  const double nf = static_cast<double>(mags.size());
  double s_sum = 0.0, fs_sum = 0.0, f2s_sum = 0.0, f4s_sum = 0.0, f4_sum = 0.0;
  for (size_t k = 0; k < mags.size(); ++k) {
    double f = freqs[k], s = mags[k];
    s_sum += s;
    fs_sum += f * s;
    f2s_sum += f * f * s;
    f4s_sum += f * f * f * f * s;
    f4_sum += f * f * f * f;
  }
  const double s1 = s_sum / nf;
  double c2 = 0.0, c3 = 0.0, c4 = 0.0;
  for (double s : mags) {
    double d = s - s1;
    c2 += d * d;
    c3 += d * d * d;
    c4 += d * d * d * d;
  }
  const double s2 = c2 / (nf - 1.0);
  const double s5 = s_sum > 0.0 ? fs_sum / s_sum : std::numeric_limits<double>::quiet_NaN();
  double m2 = 0.0, m3 = 0.0, m4 = 0.0, mh = 0.0;
  if (std::isfinite(s5)) {
    for (size_t k = 0; k < mags.size(); ++k) {
      double d = freqs[k] - s5, s = mags[k];
      m2 += d * d * s;
      m3 += d * d * d * s;
      m4 += d * d * d * d * s;
      mh += std::sqrt(std::abs(d)) * s;
    }
  }
  const double s6 = std::sqrt(m2 / nf);

  FeatureBlock out;
  out.push(s1);
  out.push(s2);
  detail::push_guarded(out, c3 / (nf * std::pow(std::sqrt(s2), 3.0)));  // S3
  detail::push_guarded(out, c4 / (nf * s2 * s2));                       // S4
  detail::push_guarded(out, s5);
  detail::push_guarded(out, s6);
  detail::push_guarded(out, std::sqrt(f2s_sum / s_sum));                // S7
  detail::push_guarded(out, std::sqrt(f4s_sum / f2s_sum));              // S8
  detail::push_guarded(out, f2s_sum / std::sqrt(s_sum * f4_sum));       // S9, as printed
  detail::push_guarded(out, s6 / s5);                                   // S10
  detail::push_guarded(out, m3 / (nf * s6 * s6 * s6));                  // S11
  detail::push_guarded(out, m4 / (nf * s6 * s6 * s6 * s6));             // S12
  detail::push_guarded(out, mh / (nf * std::sqrt(s6)));                 // S13
  detail::push_guarded(out, std::sqrt(m2 / s_sum));                     // S14
  return out;
}

/// Time-domain features of the analytic-signal envelope.
inline FeatureBlock ht_features(std::span<const double> x) {
  return time_features(hilbert_analytic(x).envelope());
}

/// Time-domain features of the first IMF; if sifting yields no IMF the
/// residual is used instead and every slot is flagged.
inline FeatureBlock emd_features(std::span<const double> x, const EmdParams& params = {}) {
  ImfDecomposition dec = emd(x, params);
  if (!dec.imfs.empty()) return time_features(dec.imfs.front());
  FeatureBlock out = time_features(dec.residual);
  out.flagged.assign(out.flagged.size(), 1);
  return out;
}

/// Per STFT window: mean, sample std, skewness and kurtosis of the magnitude
/// column across the frequency axis, concatenated window-major.
inline FeatureBlock tf_features(const Spectrogram& sg) {
  FeatureBlock out;
  for (const auto& row : sg.rows) {
    if (row.size() < 2) throw ArgumentError("tf_features: need >= 2 frequency bins per window");
    const double n = static_cast<double>(row.size());
    double mean = std::accumulate(row.begin(), row.end(), 0.0) / n;
    double c2 = 0.0, c3 = 0.0, c4 = 0.0;
    for (double v : row) {
      double d = v - mean;
      c2 += d * d;
      c3 += d * d * d;
      c4 += d * d * d * d;
    }
    double sd = std::sqrt(c2 / (n - 1.0));
    out.push(mean);
    out.push(sd);
    detail::push_guarded(out, c3 / ((n - 1.0) * sd * sd * sd));
    detail::push_guarded(out, c4 / ((n - 1.0) * sd * sd * sd * sd));
  }
  return out;
}

struct ExtractParams {
  double sample_rate = 1.0;
  int stft_win = 250;
  int stft_overlap = 125;
  EmdParams emd;
};

/// All feature domains of one signal, concatenated in registry order.
inline FeatureBlock extract_signal_features(std::span<const double> x,
                                            const ExtractParams& params = {}) {
  FeatureBlock out = time_features(x);
  Spectrum spec = fft(x, params.sample_rate);
  auto mags = spec.onesided_magnitudes();
  auto freqs = spec.onesided_freqs();
  out.append(freq_features(mags, freqs));
  out.append(ht_features(x));
  out.append(emd_features(x, params.emd));
  out.append(tf_features(stft(x, params.stft_win, params.stft_overlap)));
  return out;
}

// ---------------------------------------------------------------------------
// Tensor
// ---------------------------------------------------------------------------

/// Per (specimen, frequency, timestep) feature vectors, path-averaged.
/// The frequency axis has one extra "all" slot when the tensor was built for
/// the ranking scope (averaged across frequencies).
struct FeatureTensor {
  FeatureLayout layout;
  std::vector<int> specimen_ids;
  std::vector<double> frequencies_khz;       // empty for rank-scope tensors
  std::vector<std::vector<double>> times;    // per specimen (cycle counts)
  // values[specimen][freq][timestep][feature]; rank-scope tensors have one
  // pseudo-frequency.
  std::vector<std::vector<std::vector<std::vector<double>>>> values;
  std::vector<std::vector<std::vector<std::vector<uint8_t>>>> flagged;

  int n_features() const { return layout.total(); }

  int specimen_index(int id) const {
    for (size_t i = 0; i < specimen_ids.size(); ++i)
      if (specimen_ids[i] == id) return static_cast<int>(i);
    throw ArgumentError("unknown specimen id " + std::to_string(id));
  }

  int freq_index(double f) const {
    for (size_t i = 0; i < frequencies_khz.size(); ++i)
      if (frequencies_khz[i] == f) return static_cast<int>(i);
    throw ArgumentError("unknown frequency " + fmt_double(f));
  }
};

/// Path-averaged extraction over the full dataset scope. Calls `progress`
/// (if set) after each (specimen, frequency, timestep) block.
inline FeatureTensor extract_all(const WaveformSource& src, const ExtractParams& params_in = {},
                                 const std::function<void()>& progress = {}) {
  const DatasetMeta& meta = src.meta();
  ExtractParams params = params_in;
  params.sample_rate = meta.sample_rate;
  const int n_windows = stft_window_count(meta.samples, params.stft_win, params.stft_overlap);

  FeatureTensor tensor;
  tensor.layout = make_layout(n_windows);
  tensor.specimen_ids = meta.specimen_ids();
  tensor.frequencies_khz = meta.frequencies_khz;
  const int nf = tensor.n_features();

  for (const auto& s : meta.specimens) {
    std::vector<double> times(s.cycles.begin(), s.cycles.end());
    tensor.times.push_back(times);
    std::vector<std::vector<std::vector<double>>> per_freq_vals;
    std::vector<std::vector<std::vector<uint8_t>>> per_freq_flags;
    for (double f : meta.frequencies_khz) {
      std::vector<std::vector<double>> per_time_vals;
      std::vector<std::vector<uint8_t>> per_time_flags;
      for (int t = 1; t <= s.timesteps(); ++t) {
        Eigen::MatrixXd block = src.block(s.id, f, t);
        std::vector<double> acc(static_cast<size_t>(nf), 0.0);
        std::vector<uint8_t> flags(static_cast<size_t>(nf), 0);
        std::vector<double> row(static_cast<size_t>(block.cols()));
        for (Eigen::Index p = 0; p < block.rows(); ++p) {
          for (Eigen::Index c = 0; c < block.cols(); ++c)
            row[static_cast<size_t>(c)] = block(p, c);
          FeatureBlock fb = extract_signal_features(row, params);
          if (static_cast<int>(fb.values.size()) != nf)
            throw ArgumentError("feature block width mismatch");
          for (int k = 0; k < nf; ++k) {
            acc[static_cast<size_t>(k)] += fb.values[static_cast<size_t>(k)];
            flags[static_cast<size_t>(k)] |= fb.flagged[static_cast<size_t>(k)];
          }
        }
        for (double& v : acc) v /= static_cast<double>(block.rows());
        per_time_vals.push_back(std::move(acc));
        per_time_flags.push_back(std::move(flags));
        if (progress) progress();
      }
      per_freq_vals.push_back(std::move(per_time_vals));
      per_freq_flags.push_back(std::move(per_time_flags));
    }
    tensor.values.push_back(std::move(per_freq_vals));
    tensor.flagged.push_back(std::move(per_freq_flags));
  }
  return tensor;
}

/// Stage-1 ranking scope: additionally mean-averaged across frequencies.
inline FeatureTensor average_frequencies(const FeatureTensor& tensor) {
  FeatureTensor out;
  out.layout = tensor.layout;
  out.specimen_ids = tensor.specimen_ids;
  out.times = tensor.times;
  const int nf = tensor.n_features();
  const size_t n_freq = tensor.frequencies_khz.size();
  for (size_t s = 0; s < tensor.values.size(); ++s) {
    const size_t n_time = tensor.values[s][0].size();
    std::vector<std::vector<double>> vals(n_time, std::vector<double>(static_cast<size_t>(nf), 0.0));
    std::vector<std::vector<uint8_t>> flags(n_time, std::vector<uint8_t>(static_cast<size_t>(nf), 0));
    for (size_t f = 0; f < n_freq; ++f) {
      for (size_t t = 0; t < n_time; ++t) {
        for (int k = 0; k < nf; ++k) {
          vals[t][static_cast<size_t>(k)] += tensor.values[s][f][t][static_cast<size_t>(k)];
          flags[t][static_cast<size_t>(k)] |= tensor.flagged[s][f][t][static_cast<size_t>(k)];
        }
      }
    }
    for (auto& vt : vals)
      for (double& v : vt) v /= static_cast<double>(n_freq);
    out.values.push_back({std::move(vals)});
    out.flagged.push_back({std::move(flags)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Ranking / selection
// ---------------------------------------------------------------------------

struct FeatureScore {
  int feature_id = 0;
  double mo = 0.0, pr = 0.0, tr = 0.0, f_all = 0.0;
  bool selected = false;
};

struct MethodSummary {
  SpMethod method = SpMethod::Raw;
  double mean_before = 0.0;
  double mean_after = 0.0;  // mean over the selected features only
  int selected_count = 0;
};

struct FeatureScoreTable {
  std::vector<FeatureScore> scores;   // one per feature id, dense
  double benchmark = 0.0;             // mean F_all over all features
  std::vector<MethodSummary> methods;

  std::vector<int> selected_ids(SpMethod m, const FeatureLayout& layout) const {
    std::vector<int> ids;
    for (int id : layout.ids_for(m))
      if (scores[static_cast<size_t>(id - 1)].selected) ids.push_back(id);
    return ids;
  }
};

/// Treats each feature's trajectory over time as an HI, scores it with the
/// prognostic criteria, and keeps features strictly above the mean F_all
/// benchmark.
inline FeatureScoreTable rank_and_select(const FeatureTensor& rank_tensor,
                                         const CriteriaOptions& opts = {},
                                         Warnings* warnings = nullptr) {
  if (rank_tensor.specimen_ids.size() < 2)
    throw ArgumentError("rank_and_select needs >= 2 specimens");
  const int nf = rank_tensor.n_features();
  FeatureScoreTable table;
  table.scores.resize(static_cast<size_t>(nf));
  double benchmark_sum = 0.0;
  for (int k = 0; k < nf; ++k) {
    std::vector<HICurve> curves;
    for (size_t s = 0; s < rank_tensor.specimen_ids.size(); ++s) {
      HICurve c;
      c.specimen_id = rank_tensor.specimen_ids[s];
      c.source = "feature";
      c.times = rank_tensor.times[s];
      const auto& per_time = rank_tensor.values[s][0];
      for (const auto& vt : per_time) c.values.push_back(vt[static_cast<size_t>(k)]);
      curves.push_back(std::move(c));
    }
    FeatureScore& fs = table.scores[static_cast<size_t>(k)];
    fs.feature_id = k + 1;
    fs.mo = monotonicity(curves);
    fs.pr = prognosability(curves, opts);
    fs.tr = trendability(curves);
    fs.f_all = fs.mo + fs.pr + fs.tr;
    benchmark_sum += fs.f_all;
  }
  table.benchmark = benchmark_sum / static_cast<double>(nf);

  int n_selected = 0;
  for (auto& fs : table.scores) {
    fs.selected = fs.f_all > table.benchmark;
    n_selected += fs.selected ? 1 : 0;
  }
  if (n_selected == 0)
    warn(warnings, "no feature exceeds the benchmark (all scores equal?); selection is empty");

  for (SpMethod m : {SpMethod::Raw, SpMethod::Fft, SpMethod::Ht, SpMethod::Emd, SpMethod::Stft}) {
    MethodSummary ms;
    ms.method = m;
    double before = 0.0, after = 0.0;
    int n_before = 0;
    for (int id : rank_tensor.layout.ids_for(m)) {
      const auto& fs = table.scores[static_cast<size_t>(id - 1)];
      before += fs.f_all;
      ++n_before;
      if (fs.selected) {
        after += fs.f_all;
        ++ms.selected_count;
      }
    }
    ms.mean_before = n_before ? before / n_before : 0.0;
    ms.mean_after = ms.selected_count ? after / ms.selected_count : 0.0;
    table.methods.push_back(ms);
  }
  return table;
}

// ---------------------------------------------------------------------------
// Tensor / score-table serialization
// ---------------------------------------------------------------------------

/// Columnar file: specimen, freq_khz, timestep, feature_id, value, flagged.
/// Rank-scope tensors use freq_khz = 0 meaning "averaged across frequencies".
inline void write_feature_tensor(const fs::path& path, const FeatureTensor& tensor) {
  TsvBuilder tsv({"specimen", "freq_khz", "timestep", "feature_id", "value", "flagged"});
  const bool rank_scope = tensor.frequencies_khz.empty();
  for (size_t s = 0; s < tensor.specimen_ids.size(); ++s) {
    const size_t n_freq = rank_scope ? 1 : tensor.frequencies_khz.size();
    for (size_t f = 0; f < n_freq; ++f) {
      double freq = rank_scope ? 0.0 : tensor.frequencies_khz[f];
      for (size_t t = 0; t < tensor.values[s][f].size(); ++t) {
        for (int k = 0; k < tensor.n_features(); ++k) {
          tsv.row({std::to_string(tensor.specimen_ids[s]), fmt_double(freq),
                   std::to_string(t + 1), std::to_string(k + 1),
                   fmt_double(tensor.values[s][f][t][static_cast<size_t>(k)]),
                   std::to_string(static_cast<int>(tensor.flagged[s][f][t][static_cast<size_t>(k)]))});
        }
      }
    }
  }
  tsv.write(path);
}

inline FeatureTensor read_feature_tensor(const fs::path& path, const DatasetMeta& meta,
                                         bool rank_scope) {
  Tsv t = read_tsv(path);
  int c_s = t.col("specimen"), c_f = t.col("freq_khz"), c_t = t.col("timestep"),
      c_id = t.col("feature_id"), c_v = t.col("value"), c_fl = t.col("flagged");
  int max_id = 0;
  for (const auto& row : t.rows) max_id = std::max(max_id, static_cast<int>(parse_long(row[c_id])));
  if ((max_id - 71) % 4 != 0 || max_id <= 71) throw IoError("feature tensor has bad id range");

  FeatureTensor tensor;
  tensor.layout = make_layout((max_id - 71) / 4);
  tensor.specimen_ids = meta.specimen_ids();
  if (!rank_scope) tensor.frequencies_khz = meta.frequencies_khz;
  const size_t n_freq = rank_scope ? 1 : meta.frequencies_khz.size();
  for (const auto& s : meta.specimens) {
    tensor.times.emplace_back(s.cycles.begin(), s.cycles.end());
    tensor.values.emplace_back(
        n_freq, std::vector<std::vector<double>>(
                    static_cast<size_t>(s.timesteps()),
                    std::vector<double>(static_cast<size_t>(max_id), 0.0)));
    tensor.flagged.emplace_back(
        n_freq, std::vector<std::vector<uint8_t>>(
                    static_cast<size_t>(s.timesteps()),
                    std::vector<uint8_t>(static_cast<size_t>(max_id), 0)));
  }
  for (const auto& row : t.rows) {
    int si = tensor.specimen_index(static_cast<int>(parse_long(row[c_s])));
    double freq = parse_double(row[c_f]);
    size_t fi = rank_scope ? 0 : static_cast<size_t>(tensor.freq_index(freq));
    size_t ti = static_cast<size_t>(parse_long(row[c_t]) - 1);
    size_t ki = static_cast<size_t>(parse_long(row[c_id]) - 1);
    tensor.values[static_cast<size_t>(si)][fi][ti][ki] = parse_double(row[c_v]);
    tensor.flagged[static_cast<size_t>(si)][fi][ti][ki] =
        static_cast<uint8_t>(parse_long(row[c_fl]));
  }
  return tensor;
}

inline void write_score_table(const fs::path& path, const FeatureScoreTable& table,
                              const FeatureLayout& layout) {
  std::ostringstream out;
  out << "# gwhi feature score table v1\n";
  out << "benchmark: " << fmt_double(table.benchmark) << "\n";
  for (const auto& ms : table.methods) {
    out << "method: " << sp_method_name(ms.method) << " mean_before: " << fmt_double(ms.mean_before)
        << " mean_after: " << fmt_double(ms.mean_after) << " selected: " << ms.selected_count
        << "\n";
  }
  out << "scores:\n";
  out << "feature_id\tmethod\tname\tmo\tpr\ttr\tf_all\tselected\n";
  for (const auto& fs : table.scores) {
    const auto& info = layout.info(fs.feature_id);
    out << fs.feature_id << '\t' << sp_method_name(info.method) << '\t' << info.name << '\t'
        << fmt_double(fs.mo) << '\t' << fmt_double(fs.pr) << '\t' << fmt_double(fs.tr) << '\t'
        << fmt_double(fs.f_all) << '\t' << (fs.selected ? 1 : 0) << '\n';
  }
  write_file_atomic(path, out.str());
}

inline FeatureScoreTable read_score_table(const fs::path& path) {
  FeatureScoreTable table;
  std::istringstream in(read_file(path));
  std::string line;
  bool in_scores = false;
  bool header_seen = false;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (!in_scores) {
      if (line == "scores:") {
        in_scores = true;
        continue;
      }
      auto toks = split_ws(line);
      if (toks[0] == "benchmark:") {
        table.benchmark = parse_double(toks.at(1));
      } else if (toks[0] == "method:") {
        MethodSummary ms;
        ms.method = sp_method_from_name(toks.at(1));
        ms.mean_before = parse_double(toks.at(3));
        ms.mean_after = parse_double(toks.at(5));
        ms.selected_count = static_cast<int>(parse_long(toks.at(7)));
        table.methods.push_back(ms);
      }
    } else {
      if (!header_seen) {
        header_seen = true;
        continue;
      }
      auto cells = split_on(line, '\t');
      FeatureScore fs;
      fs.feature_id = static_cast<int>(parse_long(cells.at(0)));
      fs.mo = parse_double(cells.at(3));
      fs.pr = parse_double(cells.at(4));
      fs.tr = parse_double(cells.at(5));
      fs.f_all = parse_double(cells.at(6));
      fs.selected = parse_long(cells.at(7)) != 0;
      table.scores.push_back(fs);
    }
  }
  return table;
}

}  // namespace gwhi

#endif  // GWHI_FEATURES_HPP
