// tests/test_data.cpp

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
#include <cstdio>
#include <filesystem>

#include "gwhi/data.hpp"
#include "gwhi/rng.hpp"

using namespace gwhi;
using Catch::Approx;

namespace {

fs::path temp_dir(const char* tag) {
  fs::path dir = fs::temp_directory_path() / (std::string("gwhi_data_") + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("build_folds is a leave-one-out partition") {
  FoldPlan plan = build_folds({1, 2, 3, 4, 5});
  REQUIRE(plan.folds.size() == 5);
  for (size_t k = 0; k < 5; ++k) {
    CHECK(plan.folds[k].test_specimen == static_cast<int>(k) + 1);
    CHECK(plan.folds[k].train_specimens.size() == 4);
  }

  FoldPlan two = build_folds({7, 3});
  REQUIRE(two.folds.size() == 2);
  CHECK(two.folds[0].test_specimen == 3);
  CHECK(two.folds[1].test_specimen == 7);

  CHECK_THROWS_AS(build_folds({1}), ConfigError);
  CHECK_THROWS_AS(build_folds({4, 4, 4}), ConfigError);
}

TEST_CASE("fold partition property over random specimen lists") {
  Rng rng(7);
  for (int rep = 0; rep < 20; ++rep) {
    int n = rng.uniform_int(2, 50);
    std::vector<int> ids;
    for (int i = 0; i < n; ++i) ids.push_back(i * 3 + 11);
    rng.shuffle(ids);
    FoldPlan plan = build_folds(ids);
    REQUIRE(plan.folds.size() == static_cast<size_t>(n));
    std::set<int> tests;
    for (const auto& f : plan.folds) {
      tests.insert(f.test_specimen);
      // train and test are disjoint and together cover everything
      CHECK(f.train_specimens.size() == static_cast<size_t>(n - 1));
      for (int t : f.train_specimens) CHECK(t != f.test_specimen);
    }
    CHECK(tests.size() == static_cast<size_t>(n));
  }
}

TEST_CASE("z-score on a hand-evaluated column") {
  Eigen::MatrixXd rows(2, 1);
  rows << 2, 4;
  auto z = ZScoreNormalizer::fit_all(rows);
  CHECK(z.mean[0] == Approx(3.0));
  CHECK(z.stddev[0] == Approx(std::sqrt(2.0)));  // sample std of {2,4}
  Eigen::MatrixXd t = z.transform(rows);
  CHECK(t(0, 0) == Approx(-1.0 / std::sqrt(2.0)));
  CHECK(t(1, 0) == Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("z-score train columns have mean 0 std 1") {
  Rng rng(3);
  Eigen::MatrixXd rows(40, 6);
  for (int r = 0; r < 40; ++r)
    for (int c = 0; c < 6; ++c) rows(r, c) = rng.normal(3.0 * c, 1.0 + c);
  std::vector<uint8_t> mask(40, 0);
  for (int r = 0; r < 30; ++r) mask[static_cast<size_t>(r)] = 1;
  auto z = ZScoreNormalizer::fit(rows, mask);
  Eigen::MatrixXd t = z.transform(rows);
  for (int c = 0; c < 6; ++c) {
    double mean = 0.0, ss = 0.0;
    for (int r = 0; r < 30; ++r) mean += t(r, c);
    mean /= 30.0;
    for (int r = 0; r < 30; ++r) ss += (t(r, c) - mean) * (t(r, c) - mean);
    CHECK(std::abs(mean) < 1e-9);
    CHECK(std::abs(std::sqrt(ss / 29.0) - 1.0) < 1e-9);
  }
}

TEST_CASE("z-score never peeks at test rows") {
  Rng rng(11);
  Eigen::MatrixXd rows(20, 3);
  for (int r = 0; r < 20; ++r)
    for (int c = 0; c < 3; ++c) rows(r, c) = rng.normal();
  std::vector<uint8_t> mask(20, 0);
  for (int r = 0; r < 12; ++r) mask[static_cast<size_t>(r)] = 1;
  auto z1 = ZScoreNormalizer::fit(rows, mask);
  // Scramble the test rows; statistics must not move.
  Eigen::MatrixXd scrambled = rows;
  for (int r = 12; r < 20; ++r)
    for (int c = 0; c < 3; ++c) scrambled(r, c) = rng.normal(100.0, 17.0);
  auto z2 = ZScoreNormalizer::fit(scrambled, mask);
  CHECK(z1.mean == z2.mean);
  CHECK(z1.stddev == z2.stddev);
}

TEST_CASE("z-score degenerate column and round trip") {
  Eigen::MatrixXd rows(2, 2);
  rows << 5, 1, 5, 3;
  Warnings w;
  auto z = ZScoreNormalizer::fit_all(rows, &w);
  CHECK(z.degenerate[0] == 1);
  CHECK_FALSE(w.empty());
  Eigen::MatrixXd t = z.transform(rows);
  CHECK(t(0, 0) == 0.0);
  CHECK(t(1, 0) == 0.0);

  Rng rng(5);
  Eigen::MatrixXd x(7, 4);
  for (int r = 0; r < 7; ++r)
    for (int c = 0; c < 4; ++c) x(r, c) = rng.normal(2.0, 5.0);
  auto zz = ZScoreNormalizer::fit_all(x);
  Eigen::MatrixXd back = zz.inverse(zz.transform(x));
  CHECK((back - x).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("min-max leaves test values unclipped") {
  auto m = MinMaxNormalizer::fit({1.0, 3.0});
  CHECK(m.transform(1.0) == Approx(0.0));
  CHECK(m.transform(3.0) == Approx(1.0));
  CHECK(m.transform(4.0) == Approx(1.5));   // outside [0,1], kept
  CHECK(m.transform(0.0) == Approx(-0.5));

  Warnings w;
  auto flat = MinMaxNormalizer::fit({2.0, 2.0}, &w);
  CHECK(flat.degenerate);
  CHECK(flat.transform(2.0) == 0.0);
}

TEST_CASE("waveform record validation") {
  WaveformRecord rec;
  rec.specimen_id = 1;
  rec.excitation_freq_khz = 50;
  rec.path = {1, 2};
  rec.cycle_count = 0;
  rec.samples = {0.0, 1.0};
  REQUIRE_NOTHROW(rec.validate());
  rec.path = {3, 3};
  CHECK_THROWS_AS(rec.validate(), ArgumentError);
  rec.path = {1, 2};
  rec.samples[0] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(rec.validate(), ArgumentError);
}

TEST_CASE("56 default paths") {
  auto paths = default_paths();
  CHECK(paths.size() == 56);
  for (const auto& p : paths) CHECK(p.actuator != p.sensor);
}

TEST_CASE("dataset round trip is value-identical in both encodings") {
  for (const char* encoding : {"binary", "text"}) {
    fs::path dir = temp_dir(encoding);
    DatasetManifest m;
    m.encoding = encoding;
    m.meta.samples = 16;
    m.meta.sample_rate = 1000.0;
    m.meta.frequencies_khz = {50, 100};
    m.meta.n_paths = 3;
    m.meta.specimens = {{1, {0, 5000, 10000}}, {2, {0, 4000}}};

    Rng rng(99);
    std::map<std::tuple<int, long, int>, Eigen::MatrixXd> blocks;
    std::string ext = m.encoding == "binary" ? ".f64" : ".txt";
    for (const auto& s : m.meta.specimens) {
      for (double f : m.meta.frequencies_khz) {
        for (int t = 1; t <= s.timesteps(); ++t) {
          Eigen::MatrixXd block(3, 16);
          for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 16; ++c) block(r, c) = rng.normal() * std::pow(10.0, rng.uniform_int(-8, 8));
          std::string rel = "s" + std::to_string(s.id) + "_f" + fmt_double(f) + "_t" +
                            std::to_string(t) + ext;
          write_block_payload(dir / rel, block, m.encoding);
          m.files[DatasetManifest::key(s.id, f, t)] = rel;
          blocks[DatasetManifest::key(s.id, f, t)] = block;
        }
      }
    }
    write_file_atomic(dir / "manifest.txt", manifest_to_text(m));

    FileWaveformSource src(dir);
    CHECK(src.meta().samples == 16);
    CHECK(src.meta().specimens.size() == 2);
    for (const auto& [key, want] : blocks) {
      auto [sid, fmilli, t] = key;
      Eigen::MatrixXd got = src.block(sid, static_cast<double>(fmilli) / 1000.0, t);
      INFO("encoding " << encoding);
      CHECK((got - want).cwiseAbs().maxCoeff() == 0.0);  // bit-identical values
    }
    fs::remove_all(dir);
  }
}

TEST_CASE("HI curve serialization round trip") {
  fs::path dir = temp_dir("curves");
  std::vector<HICurve> curves = {{1, "50", {0, 5000, 10000}, {0.0, 0.41, 1.02}},
                                 {2, "fused", {0, 4000, 9000}, {-0.1, 0.5, 0.99}}};
  write_hi_curves(dir / "c.tsv", curves);
  auto back = read_hi_curves(dir / "c.tsv");
  REQUIRE(back.size() == 2);
  CHECK(back[0].specimen_id == 1);
  CHECK(back[1].source == "fused");
  CHECK(back[0].values == curves[0].values);
  CHECK(back[1].times == curves[1].times);
  fs::remove_all(dir);
}

TEST_CASE("criteria report text round trip") {
  CriteriaReport r;
  r.mo = {0.94, 0.93, 0.012};
  r.pr = {0.91, 0.9, 0.03};
  r.tr = {0.6, 0.61, 0.08};
  r.mo_test = {0.93, 0.92, 0.04};
  r.pr_test = {0.86, 0.85, 0.1};
  r.f_all = {2.45, 2.44, 0.06};
  r.f_test = {2.39, 2.38, 0.12};
  r.percent_of_3 = 100.0 * 2.45 / 3.0;
  auto text = criteria_report_to_text(r);
  CriteriaReport b = criteria_report_from_text(text);
  CHECK(b.mo.value == r.mo.value);
  CHECK(b.f_all.seed_std == r.f_all.seed_std);
  CHECK(b.percent_of_3 == r.percent_of_3);
}
