// include/gwhi/synthgen.hpp

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
// Synthetic run-to-failure waveform datasets with known ground-truth
// degradation. Signals are Hann-windowed tone bursts whose amplitude decays
// and whose arrival is delayed as degradation d(t) grows; blocks are
// generated on demand from per-block seeds, so the full waveform set never
// has to exist in memory or on disk unless explicitly written.

#ifndef GWHI_SYNTHGEN_HPP
#define GWHI_SYNTHGEN_HPP

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "gwhi/common.hpp"
#include "gwhi/data.hpp"
#include "gwhi/rng.hpp"

namespace gwhi {

enum class DegradationLaw { Linear, Exponential, Stepped };

inline const char* degradation_law_name(DegradationLaw l) {
  switch (l) {
    case DegradationLaw::Linear: return "linear";
    case DegradationLaw::Exponential: return "exponential";
    case DegradationLaw::Stepped: return "stepped";
  }
  return "?";
}

inline DegradationLaw degradation_law_from_name(const std::string& s) {
  if (s == "linear") return DegradationLaw::Linear;
  if (s == "exponential") return DegradationLaw::Exponential;
  if (s == "stepped") return DegradationLaw::Stepped;
  throw ConfigError("unknown degradation law '" + s + "'");
}

/// Monotone d(u) with d(0) = 0 and d(1) = 1.
inline double degradation(DegradationLaw law, double u) {
  switch (law) {
    case DegradationLaw::Linear:
      return u;
    case DegradationLaw::Exponential:
      return (std::exp(2.0 * u) - 1.0) / (std::exp(2.0) - 1.0);
    case DegradationLaw::Stepped: {
      const double steps = 4.0;
      return std::min(1.0, std::floor(u * steps + 1e-12) / (steps - 1.0));
    }
  }
  return u;
}

struct SynthSpec {
  int specimens = 5;
  int min_timesteps = 25;   // lifetime lengths drawn per specimen
  int max_timesteps = 40;
  int paths = 56;
  std::vector<double> frequencies_khz = {50, 100, 125, 150, 200, 250};
  int samples = 2000;
  double sample_rate = 1e6;      // Hz; 50..250 kHz tones stay well below Nyquist
  DegradationLaw law = DegradationLaw::Linear;
  double noise_level = 0.05;     // additive Gaussian noise vs unit burst amplitude
  double specimen_variability = 0.25;  // relative jitter on the (a, b) damage gains
  double amp_drop = 0.55;        // a: amplitude fraction lost at end of life
  double delay_samples = 60.0;   // b: arrival delay at end of life, in samples
  long cycles_per_step = 5000;
  uint64_t seed = 1;

  void validate() const {
    if (specimens < 1) throw ConfigError("synth: specimens must be >= 1");
    if (min_timesteps < 3 || max_timesteps < min_timesteps)
      throw ConfigError("synth: need 3 <= min_timesteps <= max_timesteps");
    if (paths < 1 || paths > 56) throw ConfigError("synth: paths must be in 1..56");
    if (samples < 16) throw ConfigError("synth: samples must be >= 16");
    if (frequencies_khz.empty()) throw ConfigError("synth: no frequencies");
    if (noise_level < 0.0) throw ConfigError("synth: noise_level must be >= 0");
  }
};

class SynthWaveformSource : public WaveformSource {
 public:
  explicit SynthWaveformSource(const SynthSpec& spec) : spec_(spec) {
    spec_.validate();
    Rng top(hash_mix(spec_.seed, 0x5d4e9ab1ULL));
    for (int m = 1; m <= spec_.specimens; ++m) {
      Rng srng = top.fork(static_cast<uint64_t>(m));
      SpecimenMeta meta;
      meta.id = m;
      int n = srng.uniform_int(spec_.min_timesteps, spec_.max_timesteps);
      for (int t = 0; t < n; ++t)
        meta.cycles.push_back(static_cast<long>(t) * spec_.cycles_per_step);
      meta_.specimens.push_back(meta);
      // Per-specimen damage-response jitter.
      double ja = 1.0 + spec_.specimen_variability * (2.0 * srng.uniform() - 1.0);
      double jb = 1.0 + spec_.specimen_variability * (2.0 * srng.uniform() - 1.0);
      amp_gain_.push_back(spec_.amp_drop * ja);
      delay_gain_.push_back(spec_.delay_samples * jb);
    }
    meta_.samples = spec_.samples;
    meta_.sample_rate = spec_.sample_rate;
    meta_.frequencies_khz = spec_.frequencies_khz;
    meta_.n_paths = spec_.paths;
  }

  const DatasetMeta& meta() const override { return meta_; }
  const SynthSpec& spec() const { return spec_; }

  double ground_truth(int specimen_id, int timestep) const {
    const auto& s = meta_.specimen(specimen_id);
    double u = static_cast<double>(timestep - 1) / static_cast<double>(s.timesteps() - 1);
    return degradation(spec_.law, u);
  }

  std::vector<HICurve> ground_truth_curves() const {
    std::vector<HICurve> curves;
    for (const auto& s : meta_.specimens) {
      HICurve c;
      c.specimen_id = s.id;
      c.source = "truth";
      for (int t = 1; t <= s.timesteps(); ++t) {
        c.times.push_back(static_cast<double>(s.cycles[static_cast<size_t>(t - 1)]));
        c.values.push_back(ground_truth(s.id, t));
      }
      curves.push_back(std::move(c));
    }
    return curves;
  }

  Eigen::MatrixXd block(int specimen_id, double freq_khz, int timestep) const override {
    const auto& s = meta_.specimen(specimen_id);
    if (timestep < 1 || timestep > s.timesteps())
      throw ArgumentError("synth block: timestep out of range");
    int f_index = -1;
    for (size_t i = 0; i < meta_.frequencies_khz.size(); ++i)
      if (meta_.frequencies_khz[i] == freq_khz) f_index = static_cast<int>(i);
    if (f_index < 0) throw ArgumentError("synth block: unknown frequency");

    const double d = ground_truth(specimen_id, timestep);
    Eigen::MatrixXd block(spec_.paths, spec_.samples);
    for (int p = 0; p < spec_.paths; ++p) {
      // Per-block stream keyed by every coordinate: evaluation order never
      // affects the data.
      Rng rng(hash_mix(hash_mix(spec_.seed, 0xb10cULL),
                       hash_mix(static_cast<uint64_t>(specimen_id) * 131 + static_cast<uint64_t>(f_index),
                                static_cast<uint64_t>(timestep) * 977 + static_cast<uint64_t>(p))));
      // Static path response: gain and geometric arrival offset.
      Rng path_rng(hash_mix(hash_mix(spec_.seed, 0x9a7bULL),
                            static_cast<uint64_t>(specimen_id) * 59 + static_cast<uint64_t>(p)));
      const double path_gain = 1.0 + 0.35 * (2.0 * path_rng.uniform() - 1.0);
      const double path_offset = 0.05 * static_cast<double>(spec_.samples) * path_rng.uniform();

      const double amp = path_gain * (1.0 - amp_gain_[static_cast<size_t>(specimen_id - 1)] * d);
      const double delay = delay_gain_[static_cast<size_t>(specimen_id - 1)] * d;
      const double t0 = 0.2 * spec_.samples + path_offset + delay;
      const double width = 0.25 * spec_.samples;
      const double omega =
          2.0 * std::numbers::pi * freq_khz * 1000.0 / spec_.sample_rate;  // rad/sample
      for (int i = 0; i < spec_.samples; ++i) {
        const double tau = (static_cast<double>(i) - t0) / width;
        double burst = 0.0;
        if (tau >= 0.0 && tau <= 1.0) {
          const double hann = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * tau));
          burst = amp * hann * std::sin(omega * (static_cast<double>(i) - t0));
        }
        block(p, i) = burst + spec_.noise_level * rng.normal();
      }
    }
    return block;
  }

 private:
  SynthSpec spec_;
  DatasetMeta meta_;
  std::vector<double> amp_gain_;
  std::vector<double> delay_gain_;
};

/// Writes the dataset directory (manifest + payloads) and the ground-truth
/// curves alongside.
inline void generate_dataset(const SynthSpec& spec, const fs::path& dir,
                             const std::string& encoding = "binary") {
  SynthWaveformSource src(spec);
  write_dataset(src, dir, encoding);
  write_hi_curves(dir / "ground_truth.tsv", src.ground_truth_curves());
}

}  // namespace gwhi

#endif  // GWHI_SYNTHGEN_HPP
