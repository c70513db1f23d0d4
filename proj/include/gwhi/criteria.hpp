// include/gwhi/criteria.hpp

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
// Prognostic criteria for health-indicator curves: time-weighted
// Mann-Kendall monotonicity, end-of-life prognosability, minimum pairwise
// trendability, their test-specimen variants, and the combined fitness score.

#ifndef GWHI_CRITERIA_HPP
#define GWHI_CRITERIA_HPP

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "gwhi/common.hpp"
#include "gwhi/data.hpp"

namespace gwhi {

struct CriteriaOptions {
  bool population_std = true;  // std(.) in prognosability; sample std when false
};

struct FitnessWeights {
  double k_mo = 1.0;
  double k_pr = 1.0;
  double k_tr = 1.0;
};

/// Curves of one evaluation round; test_index < 0 means no held-out specimen.
struct CurveSet {
  std::vector<HICurve> curves;
  int test_index = -1;

  const HICurve& test_curve() const {
    if (test_index < 0 || test_index >= static_cast<int>(curves.size()))
      throw ArgumentError("curve set has no designated test specimen");
    return curves[static_cast<size_t>(test_index)];
  }
};

namespace detail {

inline double sgn(double v) { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); }

inline void check_curve_for_mo(const HICurve& c) {
  if (c.size() < 3) throw ArgumentError("monotonicity needs curves of length >= 3");
  for (size_t i = 1; i < c.size(); ++i)
    if (c.times[i] <= c.times[i - 1])
      throw ArgumentError("monotonicity needs strictly increasing times");
}

inline double mean(std::span<const double> xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

inline double stddev(std::span<const double> xs, bool population) {
  double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  double n = static_cast<double>(xs.size());
  return std::sqrt(ss / (population ? n : n - 1.0));
}

inline double pearson(std::span<const double> a, std::span<const double> b, bool* degenerate) {
  double ma = mean(a), mb = mean(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa <= 0.0 || sbb <= 0.0) {
    if (degenerate) *degenerate = true;
    return 0.0;
  }
  return sab / std::sqrt(saa * sbb);
}

/// Linear resampling of a curve onto m equispaced points of its normalized
/// lifetime.
inline std::vector<double> resample_lifetime(const HICurve& c, size_t m) {
  std::vector<double> out(m);
  double t0 = c.times.front(), tN = c.times.back();
  for (size_t k = 0; k < m; ++k) {
    double u = m == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(m - 1);
    double t = t0 + u * (tN - t0);
    auto it = std::upper_bound(c.times.begin(), c.times.end(), t);
    size_t hi = std::min(c.size() - 1, static_cast<size_t>(it - c.times.begin()));
    size_t lo = hi == 0 ? 0 : hi - 1;
    if (lo == hi) {
      out[k] = c.values[lo];
    } else {
      double w = (t - c.times[lo]) / (c.times[hi] - c.times[lo]);
      out[k] = c.values[lo] + w * (c.values[hi] - c.values[lo]);
    }
  }
  return out;
}

}  // namespace detail

/// Time-weighted Mann-Kendall statistic of one curve:
/// mean over i of | sum_{j>i} (t_j - t_i) sgn(y_j - y_i) / sum_{j>i} (t_j - t_i) |.
inline double curve_monotonicity(const HICurve& c) {
  detail::check_curve_for_mo(c);
  const size_t n = c.size();
  double acc = 0.0;
  for (size_t i = 0; i + 1 < n; ++i) {
    double num = 0.0, den = 0.0;
    for (size_t j = i + 1; j < n; ++j) {
      double dt = c.times[j] - c.times[i];
      num += dt * detail::sgn(c.values[j] - c.values[i]);
      den += dt;
    }
    acc += num / den;
  }
  return std::abs(acc / static_cast<double>(n - 1));
}

/// Mean curve-wise Mann-Kendall statistic over all specimens.
inline double monotonicity(std::span<const HICurve> curves) {
  if (curves.empty()) throw ArgumentError("monotonicity: no curves");
  double s = 0.0;
  for (const auto& c : curves) s += curve_monotonicity(c);
  return s / static_cast<double>(curves.size());
}

/// exp( -std of end-of-life values / mean |first - last| ). A zero mean range
/// is degenerate and collapses to 0 with a flag.
inline double prognosability(std::span<const HICurve> curves, const CriteriaOptions& opts = {},
                             bool* degenerate = nullptr) {
  if (curves.size() < 2) throw ArgumentError("prognosability needs >= 2 curves");
  std::vector<double> eol;
  double range_sum = 0.0;
  for (const auto& c : curves) {
    if (c.size() < 2) throw ArgumentError("prognosability needs curves of length >= 2");
    eol.push_back(c.values.back());
    range_sum += std::abs(c.values.front() - c.values.back());
  }
  double mean_range = range_sum / static_cast<double>(curves.size());
  if (mean_range <= 0.0) {
    if (degenerate) *degenerate = true;
    return 0.0;
  }
  return std::exp(-detail::stddev(eol, opts.population_std) / mean_range);
}

/// Minimum pairwise Pearson correlation; unequal lengths are linearly
/// resampled to the shortest curve's length over normalized lifetime.
inline double trendability(std::span<const HICurve> curves, bool* degenerate = nullptr) {
  if (curves.size() < 2) throw ArgumentError("trendability needs >= 2 curves");
  size_t m = curves[0].size();
  bool equal_grid = true;
  for (const auto& c : curves) {
    if (c.size() != curves[0].size()) equal_grid = false;
    m = std::min(m, c.size());
  }
  if (m < 2) throw ArgumentError("trendability needs curves of length >= 2");
  std::vector<std::vector<double>> ys;
  for (const auto& c : curves)
    ys.push_back(equal_grid ? c.values : detail::resample_lifetime(c, m));
  double lo = 1.0;
  for (size_t a = 0; a + 1 < ys.size(); ++a)
    for (size_t b = a + 1; b < ys.size(); ++b)
      lo = std::min(lo, detail::pearson(ys[a], ys[b], degenerate));
  return lo;
}

/// Monotonicity restricted to the held-out specimen.
inline double mo_test(const HICurve& test_curve) { return curve_monotonicity(test_curve); }

/// exp( -|test EoL - mean train EoL| / mean over ALL specimens of |first-last| ).
inline double pr_test(const CurveSet& set, bool* degenerate = nullptr) {
  const HICurve& test = set.test_curve();
  double train_eol_sum = 0.0;
  int train_count = 0;
  double range_sum = 0.0;
  for (size_t i = 0; i < set.curves.size(); ++i) {
    const auto& c = set.curves[i];
    if (c.size() < 2) throw ArgumentError("pr_test needs curves of length >= 2");
    range_sum += std::abs(c.values.front() - c.values.back());
    if (static_cast<int>(i) != set.test_index) {
      train_eol_sum += c.values.back();
      ++train_count;
    }
  }
  if (train_count == 0) throw ArgumentError("pr_test needs at least one training curve");
  double mean_range = range_sum / static_cast<double>(set.curves.size());
  if (mean_range <= 0.0) {
    if (degenerate) *degenerate = true;
    return 0.0;
  }
  double dev = std::abs(test.values.back() - train_eol_sum / static_cast<double>(train_count));
  return std::exp(-dev / mean_range);
}

struct CriteriaValues {
  double mo = 0.0;
  double pr = 0.0;
  double tr = 0.0;
  double mo_test = 0.0;   // NaN-free: 0 when no test curve designated
  double pr_test = 0.0;
  double f_all = 0.0;
  double f_test = 0.0;
  bool degenerate = false;
};

/// Full criteria evaluation of one curve set. F_test terms are computed only
/// when a test specimen is designated.
inline CriteriaValues evaluate_criteria(const CurveSet& set, const CriteriaOptions& opts = {},
                                        const FitnessWeights& w = {}) {
  CriteriaValues v;
  v.mo = monotonicity(set.curves);
  v.pr = prognosability(set.curves, opts, &v.degenerate);
  v.tr = trendability(set.curves, &v.degenerate);
  v.f_all = w.k_mo * v.mo + w.k_pr * v.pr + w.k_tr * v.tr;
  if (set.test_index >= 0) {
    v.mo_test = mo_test(set.test_curve());
    v.pr_test = pr_test(set, &v.degenerate);
    v.f_test = w.k_mo * v.mo_test + w.k_pr * v.pr_test + w.k_tr * v.tr;
  }
  return v;
}

}  // namespace gwhi

#endif  // GWHI_CRITERIA_HPP
