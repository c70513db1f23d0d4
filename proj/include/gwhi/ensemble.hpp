// include/gwhi/ensemble.hpp

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
// Seed averaging and fitness-weighted fusion of per-frequency HI curves.

#ifndef GWHI_ENSEMBLE_HPP
#define GWHI_ENSEMBLE_HPP

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "gwhi/common.hpp"
#include "gwhi/criteria.hpp"
#include "gwhi/data.hpp"

namespace gwhi {

/// Pointwise arithmetic mean of equal-grid curves (one specimen, N seeds).
inline HICurve seed_average(std::span<const HICurve> curves) {
  if (curves.empty()) throw ArgumentError("seed_average: no curves");
  HICurve out = curves[0];
  for (size_t s = 1; s < curves.size(); ++s) {
    const auto& c = curves[s];
    if (c.specimen_id != out.specimen_id || c.size() != out.size() || c.times != out.times)
      throw ArgumentError("seed_average: curve grids do not match");
    for (size_t i = 0; i < out.size(); ++i) out.values[i] += c.values[i];
  }
  for (double& v : out.values) v /= static_cast<double>(curves.size());
  return out;
}

/// One excitation frequency's seed-averaged curves (one per specimen, all on
/// the same specimen order) and its fitness weight.
struct FrequencyBundle {
  double freq_khz = 0.0;
  std::vector<HICurve> curves;
  double weight = 0.0;  // omega_f = F_all of the seed-averaged curves
};

struct FusionWeights {
  std::vector<double> raw;         // omega_f after the positivity clamp
  std::vector<double> normalized;  // tilde-omega_f, sums to 1
};

constexpr double kFusionWeightClamp = 1e-6;

namespace detail {

inline void check_bundles(std::span<const FrequencyBundle> bundles) {
  if (bundles.empty()) throw ArgumentError("wae_fuse: no frequency bundles");
  const auto& first = bundles[0].curves;
  for (const auto& b : bundles) {
    if (b.curves.size() != first.size())
      throw ArgumentError("wae_fuse: bundles cover different specimens");
    for (size_t s = 0; s < first.size(); ++s)
      if (b.curves[s].specimen_id != first[s].specimen_id)
        throw ArgumentError("wae_fuse: specimen order differs between bundles");
  }
}

/// Curve resampled onto the target curve's lifetime-fraction grid.
inline HICurve align_to(const HICurve& c, const HICurve& target) {
  if (c.times == target.times) return c;
  HICurve out;
  out.specimen_id = c.specimen_id;
  out.source = c.source;
  out.times = target.times;
  out.values.resize(target.size());
  for (size_t i = 0; i < target.size(); ++i) {
    double u = target.lifetime_fraction(i);
    double t = c.times.front() + u * (c.times.back() - c.times.front());
    auto it = std::upper_bound(c.times.begin(), c.times.end(), t);
    size_t hi = std::min(c.size() - 1, static_cast<size_t>(it - c.times.begin()));
    size_t lo = hi == 0 ? 0 : hi - 1;
    if (lo == hi || c.times[hi] == c.times[lo]) {
      out.values[i] = c.values[lo];
    } else {
      double w = (t - c.times[lo]) / (c.times[hi] - c.times[lo]);
      out.values[i] = c.values[lo] + w * (c.values[hi] - c.values[lo]);
    }
  }
  return out;
}

}  // namespace detail

inline FusionWeights normalize_fusion_weights(std::span<const FrequencyBundle> bundles) {
  bool any_positive = false;
  for (const auto& b : bundles) any_positive = any_positive || b.weight > 0.0;
  if (!any_positive) throw ArgumentError("wae_fuse: all fitness weights are non-positive");
  FusionWeights w;
  double sum = 0.0;
  for (const auto& b : bundles) {
    w.raw.push_back(std::max(b.weight, kFusionWeightClamp));
    sum += w.raw.back();
  }
  for (double r : w.raw) w.normalized.push_back(r / sum);
  return w;
}

/// Weighted-average ensemble across frequencies: y-hat = sum tilde-omega_f
/// y-bar^f per specimen, on the first bundle's (lifetime-aligned) grid.
inline std::vector<HICurve> wae_fuse(std::span<const FrequencyBundle> bundles,
                                     FusionWeights* weights_out = nullptr) {
  detail::check_bundles(bundles);
  FusionWeights w = normalize_fusion_weights(bundles);
  std::vector<HICurve> fused;
  for (size_t s = 0; s < bundles[0].curves.size(); ++s) {
    HICurve out = bundles[0].curves[s];
    out.source = "fused";
    std::fill(out.values.begin(), out.values.end(), 0.0);
    for (size_t f = 0; f < bundles.size(); ++f) {
      HICurve aligned = detail::align_to(bundles[f].curves[s], out);
      for (size_t i = 0; i < out.size(); ++i)
        out.values[i] += w.normalized[f] * aligned.values[i];
    }
    fused.push_back(std::move(out));
  }
  if (weights_out) *weights_out = std::move(w);
  return fused;
}

/// Applies previously computed fusion weights to one seed's per-frequency
/// curves; used to report the across-seed spread of the fused fitness.
inline std::vector<HICurve> fuse_with_weights(std::span<const FrequencyBundle> bundles,
                                              const FusionWeights& w) {
  detail::check_bundles(bundles);
  if (w.normalized.size() != bundles.size())
    throw ArgumentError("fuse_with_weights: weight count mismatch");
  std::vector<HICurve> fused;
  for (size_t s = 0; s < bundles[0].curves.size(); ++s) {
    HICurve out = bundles[0].curves[s];
    out.source = "fused";
    std::fill(out.values.begin(), out.values.end(), 0.0);
    for (size_t f = 0; f < bundles.size(); ++f) {
      HICurve aligned = detail::align_to(bundles[f].curves[s], out);
      for (size_t i = 0; i < out.size(); ++i)
        out.values[i] += w.normalized[f] * aligned.values[i];
    }
    fused.push_back(std::move(out));
  }
  return fused;
}

}  // namespace gwhi

#endif  // GWHI_ENSEMBLE_HPP
