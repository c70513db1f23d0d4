// tests/helpers.hpp

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

#ifndef GWHI_TESTS_HELPERS_HPP
#define GWHI_TESTS_HELPERS_HPP

#include <vector>

#include "gwhi/features.hpp"
#include "gwhi/rng.hpp"

namespace helpers {

/// Per-frequency feature tensor with a known degradation signal: the first
/// half of the feature slots trend with d(t) = t/(N-1) (varying gains per
/// specimen/frequency), the second half is noise.
inline gwhi::FeatureTensor model_test_tensor(int specimens, const std::vector<double>& freqs,
                                             int steps_lo, int steps_hi, int n_features,
                                             uint64_t seed, double noise) {
  gwhi::Rng rng(seed);
  gwhi::FeatureTensor tensor;
  tensor.layout = gwhi::make_layout(1);  // 75 slots; tests address 1..n_features
  tensor.frequencies_khz = freqs;
  const int nf = tensor.layout.total();
  for (int s = 1; s <= specimens; ++s) {
    tensor.specimen_ids.push_back(s);
    int steps = rng.uniform_int(steps_lo, steps_hi);
    std::vector<double> times;
    for (int t = 0; t < steps; ++t) times.push_back(5000.0 * t);
    tensor.times.push_back(times);

    std::vector<std::vector<std::vector<double>>> per_freq_vals;
    std::vector<std::vector<std::vector<uint8_t>>> per_freq_flags;
    for (size_t f = 0; f < freqs.size(); ++f) {
      std::vector<std::vector<double>> vals;
      std::vector<std::vector<uint8_t>> flags;
      for (int t = 0; t < steps; ++t) {
        double d = static_cast<double>(t) / static_cast<double>(steps - 1);
        std::vector<double> row(static_cast<size_t>(nf), 0.0);
        for (int k = 0; k < n_features; ++k) {
          gwhi::Rng coef(gwhi::hash_mix(gwhi::hash_mix(seed, static_cast<uint64_t>(f)),
                                        static_cast<uint64_t>(k)));
          double base = coef.uniform(-1.0, 1.0);
          double gain = coef.uniform(0.5, 2.0) * (k % 2 ? -1.0 : 1.0);
          double v = k < n_features / 2 ? base + gain * d : base;
          row[static_cast<size_t>(k)] = v + noise * rng.normal();
        }
        vals.push_back(std::move(row));
        flags.emplace_back(static_cast<size_t>(nf), 0);
      }
      per_freq_vals.push_back(std::move(vals));
      per_freq_flags.push_back(std::move(flags));
    }
    tensor.values.push_back(std::move(per_freq_vals));
    tensor.flagged.push_back(std::move(per_freq_flags));
  }
  return tensor;
}

inline std::vector<int> first_ids(int n) {
  std::vector<int> ids;
  for (int i = 1; i <= n; ++i) ids.push_back(i);
  return ids;
}

}  // namespace helpers

#endif  // GWHI_TESTS_HELPERS_HPP
