// tests/test_features.cpp

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
#include <numbers>

#include "gwhi/features.hpp"
#include "gwhi/rng.hpp"

using namespace gwhi;
using Catch::Approx;

namespace {

// Feature ids are 1-based; blocks are 0-based.
enum TimeSlot {
  kMean = 0, kStd, kRoot, kRms, kRss, kPeak, kSkew, kKurt, kCrest, kClearance,
  kShape, kImpulse, kMaxMin, kCm3, kCm4, kCm5, kCm6, kFm4, kMedian
};

std::vector<double> tone(size_t n, double cycles) {
  std::vector<double> x(n);
  for (size_t i = 0; i < n; ++i)
    x[i] = std::sin(2.0 * std::numbers::pi * cycles * static_cast<double>(i) /
                    static_cast<double>(n));
  return x;
}

}  // namespace

TEST_CASE("time features, hand evaluated") {
  auto f = time_features(std::vector<double>{1, 2, 3});
  CHECK(f.values[kMean] == Approx(2.0));
  CHECK(f.values[kStd] == Approx(1.0));
  CHECK(f.values[kMaxMin] == Approx(2.0));
  CHECK(f.values[kMedian] == Approx(2.0));
  CHECK(f.values[kRss] == Approx(std::sqrt(14.0)));

  auto g = time_features(std::vector<double>{3, -4});
  CHECK(g.values[kPeak] == Approx(4.0));
  CHECK(g.values[kRms] == Approx(std::sqrt(12.5)));
  CHECK(g.values[kMaxMin] == Approx(7.0));

  // Even length: median averages the middle pair.
  auto h = time_features(std::vector<double>{4, 1, 3, 2});
  CHECK(h.values[kMedian] == Approx(2.5));
}

TEST_CASE("time features degenerate constant input") {
  auto f = time_features(std::vector<double>{5, 5, 5});
  CHECK(f.values[kStd] == 0.0);
  CHECK(f.values[kSkew] == 0.0);
  CHECK(f.flagged[kSkew] == 1);
  CHECK(f.values[kKurt] == 0.0);
  CHECK(f.flagged[kKurt] == 1);
  CHECK(f.values[kFm4] == 0.0);
  CHECK(f.flagged[kFm4] == 1);
  CHECK(f.values[kMean] == Approx(5.0));
  CHECK(f.flagged[kMean] == 0);

  CHECK_THROWS_AS(time_features(std::vector<double>{1.0}), ArgumentError);
}

TEST_CASE("time feature scale behavior") {
  Rng rng(21);
  std::vector<double> x(256);
  for (double& v : x) v = rng.normal();
  auto base = time_features(x);
  for (double c : {3.0, -0.5}) {
    std::vector<double> scaled(x.size());
    for (size_t i = 0; i < x.size(); ++i) scaled[i] = c * x[i];
    auto f = time_features(scaled);
    CHECK(f.values[kRms] == Approx(std::abs(c) * base.values[kRms]));
    CHECK(f.values[kCrest] == Approx(base.values[kCrest]));  // scale invariant
    CHECK(f.values[kFm4] == Approx(base.values[kFm4]));      // scale invariant
  }
}

TEST_CASE("feature determinism") {
  Rng rng(7);
  std::vector<double> x(500);
  for (double& v : x) v = rng.normal();
  auto a = extract_signal_features(x);
  auto b = extract_signal_features(x);
  CHECK(a.values == b.values);
  CHECK(a.flagged == b.flagged);
}

TEST_CASE("frequency features, hand evaluated") {
  // Point mass: single nonzero bin at f = 10 with s = 2.
  std::vector<double> mags = {0, 0, 2, 0};
  std::vector<double> freqs = {0, 5, 10, 15};
  auto f = freq_features(mags, freqs);
  CHECK(f.values[4] == Approx(10.0));  // S5 centroid
  CHECK(f.values[5] == Approx(0.0).margin(1e-15));  // S6

  // Flat spectrum over bins 0..3.
  std::vector<double> flat = {1, 1, 1, 1};
  std::vector<double> bins = {0, 1, 2, 3};
  auto g = freq_features(flat, bins);
  CHECK(g.values[4] == Approx(1.5));  // S5
  CHECK(g.values[1] == Approx(0.0).margin(1e-15));  // S2 of constant magnitudes

  // S1 is the plain mean of magnitudes.
  CHECK(g.values[0] == Approx(1.0));

  CHECK_THROWS_AS(freq_features(std::vector<double>{1.0}, std::vector<double>{0.0}),
                  ArgumentError);
  CHECK_THROWS_AS(freq_features(std::vector<double>{-1.0, 1.0}, std::vector<double>{0.0, 1.0}),
                  ArgumentError);
}

TEST_CASE("frequency features degenerate all-zero spectrum") {
  std::vector<double> mags = {0, 0, 0, 0};
  std::vector<double> freqs = {0, 1, 2, 3};
  auto f = freq_features(mags, freqs);
  CHECK(f.values[4] == 0.0);  // centroid undefined -> 0
  CHECK(f.flagged[4] == 1);
  for (double v : f.values) CHECK(std::isfinite(v));
}

TEST_CASE("ht features: envelope of a unit cosine") {
  auto f = ht_features(tone(2000, 20.0));
  CHECK(f.values[kMean] == Approx(1.0).margin(0.01));
  CHECK(f.values[kStd] == Approx(0.0).margin(0.01));
}

TEST_CASE("ht and emd features of the zero signal are flagged zeros") {
  std::vector<double> zero(300, 0.0);
  auto h = ht_features(zero);
  for (double v : h.values) CHECK(v == 0.0);
  auto e = emd_features(zero);
  for (double v : e.values) CHECK(v == 0.0);
  // zero signal has no IMFs, so the residual was used and flagged
  for (uint8_t fl : e.flagged) CHECK(fl == 1);
}

TEST_CASE("emd features of a pure tone match its time features within 2%") {
  auto x = tone(2000, 5.0);
  auto direct = time_features(x);
  auto viaimf = emd_features(x);
  for (int k : {kStd, kRms, kPeak, kMaxMin}) {
    CHECK(viaimf.values[static_cast<size_t>(k)] ==
          Approx(direct.values[static_cast<size_t>(k)]).epsilon(0.02));
  }
}

TEST_CASE("tf features, hand evaluated windows") {
  Spectrogram sg;
  sg.win_len = 4;
  sg.hop_len = 2;
  sg.rows = {{1, 1, 1, 1}, {0, 2}};
  auto f = tf_features(sg);
  REQUIRE(f.values.size() == 8);
  CHECK(f.values[0] == Approx(1.0));  // window 1 mean
  CHECK(f.values[1] == Approx(0.0).margin(1e-15));
  CHECK(f.values[2] == 0.0);  // skew of zero-variance window, flagged
  CHECK(f.flagged[2] == 1);
  CHECK(f.values[3] == 0.0);
  CHECK(f.values[4] == Approx(1.0));          // window 2 mean
  CHECK(f.values[5] == Approx(std::sqrt(2.0)));  // sample std of {0,2}
}

TEST_CASE("registry layout: default 2000-sample signals give ids 1..131") {
  const int windows = stft_window_count(2000, 250, 125);
  CHECK(windows == 15);
  FeatureLayout layout = make_layout(windows);
  CHECK(layout.total() == 131);  // 71 + 4*15; the 139 layout needs 17 windows
  CHECK(make_layout(17).total() == 139);

  // dense, stable, every id maps to exactly one entry
  for (int id = 1; id <= layout.total(); ++id) CHECK(layout.info(id).id == id);
  CHECK(layout.ids_for(SpMethod::Raw).size() == 19);
  CHECK(layout.ids_for(SpMethod::Fft).size() == 14);
  CHECK(layout.ids_for(SpMethod::Ht).size() == 19);
  CHECK(layout.ids_for(SpMethod::Emd).size() == 19);
  CHECK(layout.ids_for(SpMethod::Stft).size() == 4 * windows);
  CHECK(layout.ids_for(SpMethod::Fft).front() == 20);
  CHECK(layout.ids_for(SpMethod::Ht).front() == 34);
  CHECK(layout.ids_for(SpMethod::Emd).front() == 53);
  CHECK(layout.ids_for(SpMethod::Stft).front() == 72);

  Rng rng(9);
  std::vector<double> x(2000);
  for (double& v : x) v = rng.normal();
  auto block = extract_signal_features(x);
  CHECK(static_cast<int>(block.values.size()) == layout.total());
}

namespace {

/// Two-path stub where path 2 is path 1 shifted by a constant offset in
/// feature space (here: identical), for the averaging contract.
class StubSource : public WaveformSource {
 public:
  StubSource(int paths, bool duplicate) : paths_(paths), duplicate_(duplicate) {
    meta_.samples = 300;
    meta_.sample_rate = 1.0;
    meta_.frequencies_khz = {50};
    meta_.n_paths = paths;
    meta_.specimens = {{1, {0, 5000, 10000}}};
  }
  const DatasetMeta& meta() const override { return meta_; }
  Eigen::MatrixXd block(int, double, int timestep) const override {
    Eigen::MatrixXd b(paths_, meta_.samples);
    Rng rng(static_cast<uint64_t>(timestep));
    for (int c = 0; c < meta_.samples; ++c) b(0, c) = rng.normal();
    for (int p = 1; p < paths_; ++p)
      for (int c = 0; c < meta_.samples; ++c)
        b(p, c) = duplicate_ ? b(0, c) : rng.normal();
    return b;
  }

 private:
  DatasetMeta meta_;
  int paths_;
  bool duplicate_;
};

}  // namespace

TEST_CASE("extract_all averages across paths") {
  // Duplicated paths equal single-path extraction.
  StubSource dup(3, true), single(1, true);
  auto td = extract_all(dup);
  auto ts = extract_all(single);
  for (size_t t = 0; t < td.values[0][0].size(); ++t)
    for (size_t k = 0; k < td.values[0][0][t].size(); ++k)
      CHECK(td.values[0][0][t][k] == Approx(ts.values[0][0][t][k]).margin(1e-12));

  // Two known values average to their midpoint: check the mean feature by
  // constructing a 2-path block of constants 1 and 3.
  class TwoConst : public WaveformSource {
   public:
    TwoConst() {
      meta_.samples = 64;
      meta_.frequencies_khz = {50};
      meta_.n_paths = 2;
      meta_.specimens = {{1, {0, 1000}}};
    }
    const DatasetMeta& meta() const override { return meta_; }
    Eigen::MatrixXd block(int, double, int) const override {
      Eigen::MatrixXd b(2, 64);
      b.row(0).setConstant(1.0);
      b.row(1).setConstant(3.0);
      return b;
    }
    DatasetMeta meta_;
  } two;
  ExtractParams params;
  params.stft_win = 16;
  params.stft_overlap = 8;
  auto tt = extract_all(two, params);
  CHECK(tt.values[0][0][0][0] == Approx(2.0));  // mean feature averaged over paths
}

namespace {

FeatureTensor rank_tensor_with(const std::function<double(int specimen, int t, int k)>& fill,
                               int n_features_windows = 1, int specimens = 3, int steps = 12) {
  FeatureTensor tensor;
  tensor.layout = make_layout(n_features_windows);
  const int nf = tensor.layout.total();
  for (int s = 1; s <= specimens; ++s) {
    tensor.specimen_ids.push_back(s);
    std::vector<double> times;
    for (int t = 0; t < steps; ++t) times.push_back(5000.0 * t);
    tensor.times.push_back(times);
    std::vector<std::vector<double>> vals;
    std::vector<std::vector<uint8_t>> flags;
    for (int t = 0; t < steps; ++t) {
      std::vector<double> row(static_cast<size_t>(nf));
      for (int k = 0; k < nf; ++k) row[static_cast<size_t>(k)] = fill(s, t, k);
      vals.push_back(std::move(row));
      flags.emplace_back(static_cast<size_t>(nf), 0);
    }
    tensor.values.push_back({std::move(vals)});
    tensor.flagged.push_back({std::move(flags)});
  }
  return tensor;
}

}  // namespace

TEST_CASE("rank_and_select: monotone features beat noise, strict benchmark") {
  Rng rng(12);
  auto noise = [&rng](int, int, int) { return rng.normal(); };
  // feature 1 (index 0): identical clean monotone trajectory; rest is noise
  auto tensor = rank_tensor_with([&](int, int t, int k) {
    if (k == 0) return static_cast<double>(t) / 11.0;
    return noise(0, t, k);
  });
  auto table = rank_and_select(tensor);
  // benchmark is the mean of all f_all values
  double mean = 0.0;
  for (const auto& fs : table.scores) mean += fs.f_all;
  mean /= static_cast<double>(table.scores.size());
  CHECK(table.benchmark == Approx(mean).margin(1e-12));
  for (const auto& fs : table.scores)
    CHECK(fs.selected == (fs.f_all > table.benchmark));
  CHECK(table.scores[0].selected);
  CHECK(table.scores[0].f_all == Approx(3.0).margin(1e-9));
  // method summaries cover all five SP methods
  CHECK(table.methods.size() == 5);
}

TEST_CASE("rank_and_select: all-equal scores select nothing and warn") {
  auto tensor = rank_tensor_with([](int, int t, int) { return static_cast<double>(t); });
  Warnings w;
  auto table = rank_and_select(tensor, {}, &w);
  for (const auto& fs : table.scores) CHECK_FALSE(fs.selected);
  CHECK_FALSE(w.empty());
}

TEST_CASE("feature tensor file round trip") {
  Rng rng(31);
  auto tensor = rank_tensor_with([&](int, int, int) { return rng.normal(); });
  fs::path dir = fs::temp_directory_path() / "gwhi_feat_rt";
  fs::create_directories(dir);
  write_feature_tensor(dir / "t.tsv", tensor);

  DatasetMeta meta;
  meta.samples = 2000;
  meta.frequencies_khz = {50};
  for (size_t s = 0; s < tensor.specimen_ids.size(); ++s) {
    SpecimenMeta sm;
    sm.id = tensor.specimen_ids[s];
    for (double t : tensor.times[s]) sm.cycles.push_back(static_cast<long>(t));
    meta.specimens.push_back(sm);
  }
  auto back = read_feature_tensor(dir / "t.tsv", meta, true);
  for (size_t s = 0; s < tensor.values.size(); ++s)
    for (size_t t = 0; t < tensor.values[s][0].size(); ++t)
      for (size_t k = 0; k < tensor.values[s][0][t].size(); ++k)
        CHECK(back.values[s][0][t][k] == tensor.values[s][0][t][k]);  // bit-identical
  fs::remove_all(dir);
}
