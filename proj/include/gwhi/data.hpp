// include/gwhi/data.hpp

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
// Dataset schema, leave-one-out fold protocol and the two normalization
// contracts (Z-score on inputs, min-max on health-indicator outputs) shared
// by every downstream module.

#ifndef GWHI_DATA_HPP
#define GWHI_DATA_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gwhi/common.hpp"
#include "gwhi/io.hpp"

namespace gwhi {

// ---------------------------------------------------------------------------
// Waveform records
// ---------------------------------------------------------------------------

struct PathPair {
  int actuator = 0;
  int sensor = 0;
};

/// All ordered actuator/sensor pairs for a ring of n transducers, in
/// lexicographic order. n = 8 gives the 56 inspection paths.
inline std::vector<PathPair> default_paths(int n_transducers = 8) {
  std::vector<PathPair> paths;
  for (int a = 1; a <= n_transducers; ++a)
    for (int s = 1; s <= n_transducers; ++s)
      if (a != s) paths.push_back({a, s});
  return paths;
}

/// One raw time-domain measurement of one actuator-sensor path at one
/// excitation frequency and one fatigue timestep.
struct WaveformRecord {
  int specimen_id = 0;
  double excitation_freq_khz = 0.0;
  PathPair path;
  int timestep_index = 1;   // 1-based
  long cycle_count = 0;
  std::vector<double> samples;

  void validate() const {
    if (specimen_id <= 0) throw ArgumentError("specimen_id must be positive");
    if (timestep_index < 1) throw ArgumentError("timestep_index must be >= 1");
    if (cycle_count < 0) throw ArgumentError("cycle_count must be non-negative");
    if (path.actuator == path.sensor) throw ArgumentError("actuator must differ from sensor");
    if (path.actuator < 1 || path.actuator > 8 || path.sensor < 1 || path.sensor > 8)
      throw ArgumentError("transducer ids must be in 1..8");
    if (!all_finite(samples)) throw ArgumentError("samples contain non-finite values");
  }
};

struct SpecimenMeta {
  int id = 0;
  std::vector<long> cycles;  // strictly increasing, one per timestep

  int timesteps() const { return static_cast<int>(cycles.size()); }
};

struct DatasetMeta {
  int samples = 2000;
  double sample_rate = 1.0;  // Hz
  std::vector<double> frequencies_khz;
  int n_paths = 56;
  std::vector<SpecimenMeta> specimens;

  const SpecimenMeta& specimen(int id) const {
    for (const auto& s : specimens)
      if (s.id == id) return s;
    throw ArgumentError("unknown specimen id " + std::to_string(id));
  }

  std::vector<int> specimen_ids() const {
    std::vector<int> ids;
    for (const auto& s : specimens) ids.push_back(s.id);
    return ids;
  }

  void validate() const {
    if (specimens.empty()) throw ArgumentError("dataset has no specimens");
    if (frequencies_khz.empty()) throw ArgumentError("dataset has no frequencies");
    if (n_paths < 1 || n_paths > 56) throw ArgumentError("paths per measurement must be in 1..56");
    for (const auto& s : specimens) {
      if (s.cycles.size() < 2) throw ArgumentError("specimen needs >= 2 timesteps");
      for (size_t i = 1; i < s.cycles.size(); ++i)
        if (s.cycles[i] <= s.cycles[i - 1])
          throw ArgumentError("cycle_count must be strictly increasing with timestep");
    }
  }
};

/// Read-side abstraction over a dataset: one block = the paths x samples
/// matrix of one (specimen, frequency, timestep). Implemented by the on-disk
/// reader below and by the synthetic generator, which produces blocks on the
/// fly so desk-scale runs never materialize the full waveform set.
class WaveformSource {
 public:
  virtual ~WaveformSource() = default;
  virtual const DatasetMeta& meta() const = 0;
  virtual Eigen::MatrixXd block(int specimen_id, double freq_khz, int timestep) const = 0;
};

// ---------------------------------------------------------------------------
// On-disk dataset: manifest (key-value header + file table) plus one payload
// file per (specimen, frequency, timestep) holding a paths x samples matrix,
// delimited text or packed little-endian float64 per the `encoding` field.
// ---------------------------------------------------------------------------

struct DatasetManifest {
  int version = 1;
  std::string encoding = "binary";  // "binary" | "text"
  DatasetMeta meta;
  // (specimen, freq_khz, timestep) -> payload path relative to the manifest.
  std::map<std::tuple<int, long, int>, std::string> files;

  static std::tuple<int, long, int> key(int specimen, double freq_khz, int timestep) {
    return {specimen, std::lround(freq_khz * 1000.0), timestep};
  }

  const std::string& file_for(int specimen, double freq_khz, int timestep) const {
    auto it = files.find(key(specimen, freq_khz, timestep));
    if (it == files.end())
      throw IoError("manifest has no payload for specimen " + std::to_string(specimen) +
                    " freq " + fmt_double(freq_khz) + " timestep " + std::to_string(timestep));
    return it->second;
  }
};

inline std::string manifest_to_text(const DatasetManifest& m) {
  std::ostringstream out;
  out << "# gwhi dataset manifest\n";
  out << "version: " << m.version << "\n";
  out << "encoding: " << m.encoding << "\n";
  out << "samples: " << m.meta.samples << "\n";
  out << "sample_rate: " << fmt_double(m.meta.sample_rate) << "\n";
  out << "paths: " << m.meta.n_paths << "\n";
  out << "frequencies:";
  for (double f : m.meta.frequencies_khz) out << " " << fmt_double(f);
  out << "\n";
  for (const auto& s : m.meta.specimens) {
    out << "specimen: " << s.id << " cycles:";
    for (long c : s.cycles) out << " " << c;
    out << "\n";
  }
  out << "files:\n";
  out << "# specimen freq_khz timestep relpath\n";
  for (const auto& [k, rel] : m.files) {
    auto [sid, fmilli, t] = k;
    out << sid << " " << fmt_double(static_cast<double>(fmilli) / 1000.0) << " " << t << " "
        << rel << "\n";
  }
  return out.str();
}

inline DatasetManifest manifest_from_text(const std::string& text) {
  DatasetManifest m;
  std::istringstream in(text);
  std::string line;
  bool in_files = false;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (!in_files) {
      if (line == "files:") {
        in_files = true;
        continue;
      }
      auto colon = line.find(':');
      if (colon == std::string::npos) throw IoError("bad manifest line: " + line);
      std::string keyname = trim(line.substr(0, colon));
      std::string value = trim(line.substr(colon + 1));
      if (keyname == "version") {
        m.version = static_cast<int>(parse_long(value));
      } else if (keyname == "encoding") {
        m.encoding = value;
      } else if (keyname == "samples") {
        m.meta.samples = static_cast<int>(parse_long(value));
      } else if (keyname == "sample_rate") {
        m.meta.sample_rate = parse_double(value);
      } else if (keyname == "paths") {
        m.meta.n_paths = static_cast<int>(parse_long(value));
      } else if (keyname == "frequencies") {
        for (const auto& tok : split_ws(value)) m.meta.frequencies_khz.push_back(parse_double(tok));
      } else if (keyname == "specimen") {
        auto toks = split_ws(value);
        if (toks.size() < 3 || toks[1] != "cycles:") throw IoError("bad specimen line: " + line);
        SpecimenMeta s;
        s.id = static_cast<int>(parse_long(toks[0]));
        for (size_t i = 2; i < toks.size(); ++i) s.cycles.push_back(parse_long(toks[i]));
        m.meta.specimens.push_back(s);
      } else {
        throw IoError("unknown manifest key: " + keyname);
      }
    } else {
      auto toks = split_ws(line);
      if (toks.size() != 4) throw IoError("bad manifest file row: " + line);
      int sid = static_cast<int>(parse_long(toks[0]));
      double f = parse_double(toks[1]);
      int t = static_cast<int>(parse_long(toks[2]));
      m.files[DatasetManifest::key(sid, f, t)] = toks[3];
    }
  }
  if (m.version != 1) throw IoError("unsupported manifest version " + std::to_string(m.version));
  if (m.encoding != "binary" && m.encoding != "text")
    throw IoError("unknown payload encoding '" + m.encoding + "'");
  try {
    m.meta.validate();
  } catch (const ArgumentError& e) {
    throw IoError(std::string("invalid manifest: ") + e.what());
  }
  return m;
}

inline void write_block_payload(const fs::path& path, const Eigen::MatrixXd& block,
                                const std::string& encoding) {
  if (encoding == "binary") {
    std::vector<double> flat(static_cast<size_t>(block.rows()) * block.cols());
    for (Eigen::Index r = 0; r < block.rows(); ++r)
      for (Eigen::Index c = 0; c < block.cols(); ++c)
        flat[static_cast<size_t>(r) * block.cols() + c] = block(r, c);
    write_doubles_binary(path, flat);
  } else {
    std::ostringstream out;
    for (Eigen::Index r = 0; r < block.rows(); ++r) {
      for (Eigen::Index c = 0; c < block.cols(); ++c) {
        if (c) out << ' ';
        out << fmt_double(block(r, c));
      }
      out << '\n';
    }
    write_file_atomic(path, out.str());
  }
}

inline Eigen::MatrixXd read_block_payload(const fs::path& path, int rows, int cols,
                                          const std::string& encoding) {
  Eigen::MatrixXd block(rows, cols);
  if (encoding == "binary") {
    std::vector<double> flat = read_doubles_binary(path);
    if (flat.size() != static_cast<size_t>(rows) * cols)
      throw IoError("payload " + path.string() + " has wrong size");
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) block(r, c) = flat[static_cast<size_t>(r) * cols + c];
  } else {
    std::istringstream in(read_file(path));
    std::string line;
    int r = 0;
    while (std::getline(in, line)) {
      if (trim(line).empty()) continue;
      if (r >= rows) throw IoError("payload " + path.string() + " has extra rows");
      auto toks = split_ws(line);
      if (static_cast<int>(toks.size()) != cols)
        throw IoError("payload " + path.string() + " row has wrong width");
      for (int c = 0; c < cols; ++c) block(r, c) = parse_double(toks[c]);
      ++r;
    }
    if (r != rows) throw IoError("payload " + path.string() + " has missing rows");
  }
  return block;
}

class FileWaveformSource : public WaveformSource {
 public:
  explicit FileWaveformSource(const fs::path& dataset_dir)
      : dir_(dataset_dir), manifest_(manifest_from_text(read_file(dataset_dir / "manifest.txt"))) {}

  const DatasetMeta& meta() const override { return manifest_.meta; }
  const DatasetManifest& manifest() const { return manifest_; }

  Eigen::MatrixXd block(int specimen_id, double freq_khz, int timestep) const override {
    const std::string& rel = manifest_.file_for(specimen_id, freq_khz, timestep);
    return read_block_payload(dir_ / rel, manifest_.meta.n_paths, manifest_.meta.samples,
                              manifest_.encoding);
  }

 private:
  fs::path dir_;
  DatasetManifest manifest_;
};

/// Materializes any source to the on-disk layout: one directory per
/// specimen, one payload per (frequency, timestep).
inline void write_dataset(const WaveformSource& src, const fs::path& dir,
                          const std::string& encoding = "binary") {
  DatasetManifest m;
  m.encoding = encoding;
  m.meta = src.meta();
  std::string ext = encoding == "binary" ? ".f64" : ".txt";
  for (const auto& s : m.meta.specimens) {
    for (double f : m.meta.frequencies_khz) {
      for (int t = 1; t <= s.timesteps(); ++t) {
        std::ostringstream rel;
        rel << "s" << s.id << "/f" << std::lround(f) << "_t" << t << ext;
        write_block_payload(dir / rel.str(), src.block(s.id, f, t), encoding);
        m.files[DatasetManifest::key(s.id, f, t)] = rel.str();
      }
    }
  }
  write_file_atomic(dir / "manifest.txt", manifest_to_text(m));
}

// ---------------------------------------------------------------------------
// Folds
// ---------------------------------------------------------------------------

struct Fold {
  int test_specimen = 0;
  std::vector<int> train_specimens;
};

struct FoldPlan {
  std::vector<Fold> folds;
};

/// Leave-one-out plan, deterministic ordering by specimen id: fold k tests
/// the k-th smallest id.
inline FoldPlan build_folds(std::vector<int> specimen_ids) {
  std::sort(specimen_ids.begin(), specimen_ids.end());
  specimen_ids.erase(std::unique(specimen_ids.begin(), specimen_ids.end()), specimen_ids.end());
  if (specimen_ids.size() < 2)
    throw ConfigError("leave-one-out folds need at least 2 distinct specimens");
  FoldPlan plan;
  for (int test : specimen_ids) {
    Fold f;
    f.test_specimen = test;
    for (int id : specimen_ids)
      if (id != test) f.train_specimens.push_back(id);
    plan.folds.push_back(std::move(f));
  }
  return plan;
}

// ---------------------------------------------------------------------------
// Normalizers
// ---------------------------------------------------------------------------

/// Per-feature Z-score fitted on training rows only. Sample (n-1) standard
/// deviation. Zero-variance columns get sigma = 1 and are flagged so a flat
/// feature can never divide by zero.
struct ZScoreNormalizer {
  Eigen::VectorXd mean;
  Eigen::VectorXd stddev;
  std::vector<uint8_t> degenerate;  // per column

  static ZScoreNormalizer fit(const Eigen::MatrixXd& rows, const std::vector<uint8_t>& train_mask,
                              Warnings* warnings = nullptr) {
    long n_train = 0;
    for (uint8_t m : train_mask) n_train += m ? 1 : 0;
    if (static_cast<size_t>(rows.rows()) != train_mask.size())
      throw ArgumentError("train_mask length must match row count");
    if (n_train < 2) throw ArgumentError("Z-score fit needs >= 2 training rows");

    ZScoreNormalizer z;
    const Eigen::Index d = rows.cols();
    z.mean = Eigen::VectorXd::Zero(d);
    z.stddev = Eigen::VectorXd::Ones(d);
    z.degenerate.assign(static_cast<size_t>(d), 0);

    for (Eigen::Index r = 0; r < rows.rows(); ++r)
      if (train_mask[static_cast<size_t>(r)]) z.mean += rows.row(r).transpose();
    z.mean /= static_cast<double>(n_train);

    Eigen::VectorXd ss = Eigen::VectorXd::Zero(d);
    for (Eigen::Index r = 0; r < rows.rows(); ++r)
      if (train_mask[static_cast<size_t>(r)])
        ss += (rows.row(r).transpose() - z.mean).array().square().matrix();
    for (Eigen::Index c = 0; c < d; ++c) {
      double var = ss[c] / static_cast<double>(n_train - 1);
      double sd = std::sqrt(var);
      if (sd > 0.0) {
        z.stddev[c] = sd;
      } else {
        z.degenerate[static_cast<size_t>(c)] = 1;
        warn(warnings, "zero-variance training column " + std::to_string(c) + "; sigma set to 1");
      }
    }
    return z;
  }

  static ZScoreNormalizer fit_all(const Eigen::MatrixXd& rows, Warnings* warnings = nullptr) {
    return fit(rows, std::vector<uint8_t>(static_cast<size_t>(rows.rows()), 1), warnings);
  }

  Eigen::MatrixXd transform(const Eigen::MatrixXd& rows) const {
    check_width(rows.cols());
    return (rows.rowwise() - mean.transpose()).array().rowwise() /
           stddev.transpose().array();
  }

  Eigen::MatrixXd inverse(const Eigen::MatrixXd& rows) const {
    check_width(rows.cols());
    return (rows.array().rowwise() * stddev.transpose().array()).matrix().rowwise() +
           mean.transpose();
  }

 private:
  void check_width(Eigen::Index cols) const {
    if (cols != mean.size()) throw ArgumentError("feature width mismatch in Z-score transform");
  }
};

/// Scalar min-max fitted on training-specimen HI values. Test values may
/// leave [0,1] and are deliberately not clipped: the test-prognosability
/// criterion measures exactly that deviation.
struct MinMaxNormalizer {
  double min = 0.0;
  double max = 1.0;
  bool degenerate = false;

  static MinMaxNormalizer fit(const std::vector<double>& train_values,
                              Warnings* warnings = nullptr) {
    if (train_values.empty()) throw ArgumentError("min-max fit needs at least one value");
    MinMaxNormalizer m;
    m.min = *std::min_element(train_values.begin(), train_values.end());
    m.max = *std::max_element(train_values.begin(), train_values.end());
    if (m.max <= m.min) {
      m.degenerate = true;
      warn(warnings, "min-max fit on constant values; outputs collapse to 0");
    }
    return m;
  }

  double transform(double v) const { return degenerate ? 0.0 : (v - min) / (max - min); }
};

// ---------------------------------------------------------------------------
// Health-indicator curves and criteria reports
// ---------------------------------------------------------------------------

/// HI time series of one specimen; `source` is an excitation frequency in
/// kHz rendered as text, or "fused".
struct HICurve {
  int specimen_id = 0;
  std::string source;
  std::vector<double> times;   // cycle counts (or timestep indices)
  std::vector<double> values;

  size_t size() const { return times.size(); }

  double lifetime_fraction(size_t i) const {
    double t0 = times.front(), tN = times.back();
    return tN > t0 ? (times[i] - t0) / (tN - t0) : 0.0;
  }

  void validate() const {
    if (times.size() != values.size()) throw ArgumentError("HI curve times/values size mismatch");
    if (times.size() < 2) throw ArgumentError("HI curve needs >= 2 points");
    for (size_t i = 1; i < times.size(); ++i)
      if (times[i] <= times[i - 1]) throw ArgumentError("HI curve times must strictly increase");
  }
};

inline void write_hi_curves(const fs::path& path, const std::vector<HICurve>& curves) {
  TsvBuilder tsv({"specimen", "source", "time", "lifetime_fraction", "hi"});
  for (const auto& c : curves)
    for (size_t i = 0; i < c.size(); ++i)
      tsv.row({std::to_string(c.specimen_id), c.source, fmt_double(c.times[i]),
               fmt_double(c.lifetime_fraction(i)), fmt_double(c.values[i])});
  tsv.write(path);
}

inline std::vector<HICurve> read_hi_curves(const fs::path& path) {
  Tsv t = read_tsv(path);
  int c_spec = t.col("specimen"), c_src = t.col("source"), c_time = t.col("time"),
      c_hi = t.col("hi");
  std::vector<HICurve> curves;
  for (const auto& row : t.rows) {
    int sid = static_cast<int>(parse_long(row[c_spec]));
    const std::string& src = row[c_src];
    if (curves.empty() || curves.back().specimen_id != sid || curves.back().source != src) {
      curves.push_back(HICurve{sid, src, {}, {}});
    }
    curves.back().times.push_back(parse_double(row[c_time]));
    curves.back().values.push_back(parse_double(row[c_hi]));
  }
  return curves;
}

/// One scalar criterion with its across-seed statistics. `value` is the
/// criterion of the seed-averaged curves; mean/std summarize per-seed runs.
struct SeedStat {
  double value = 0.0;
  double seed_mean = 0.0;
  double seed_std = 0.0;
};

struct CriteriaReport {
  SeedStat mo, pr, tr, mo_test, pr_test, f_all, f_test;
  double percent_of_3 = 0.0;  // f_all.value relative to the maximum of 3
};

inline std::string criteria_report_to_text(const CriteriaReport& r) {
  std::ostringstream out;
  out << "# gwhi criteria report v1\n";
  out << "# field: value seed_mean seed_std\n";
  auto line = [&out](const char* name, const SeedStat& s) {
    out << name << ": " << fmt_double(s.value) << " " << fmt_double(s.seed_mean) << " "
        << fmt_double(s.seed_std) << "\n";
  };
  line("mo", r.mo);
  line("pr", r.pr);
  line("tr", r.tr);
  line("mo_test", r.mo_test);
  line("pr_test", r.pr_test);
  line("f_all", r.f_all);
  line("f_test", r.f_test);
  out << "percent_of_3: " << fmt_double(r.percent_of_3) << "\n";
  return out.str();
}

inline CriteriaReport criteria_report_from_text(const std::string& text) {
  CriteriaReport r;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    auto colon = line.find(':');
    if (colon == std::string::npos) throw IoError("bad criteria report line: " + line);
    std::string name = trim(line.substr(0, colon));
    auto toks = split_ws(trim(line.substr(colon + 1)));
    if (name == "percent_of_3") {
      r.percent_of_3 = parse_double(toks.at(0));
      continue;
    }
    if (toks.size() != 3) throw IoError("bad criteria report line: " + line);
    SeedStat s{parse_double(toks[0]), parse_double(toks[1]), parse_double(toks[2])};
    if (name == "mo") r.mo = s;
    else if (name == "pr") r.pr = s;
    else if (name == "tr") r.tr = s;
    else if (name == "mo_test") r.mo_test = s;
    else if (name == "pr_test") r.pr_test = s;
    else if (name == "f_all") r.f_all = s;
    else if (name == "f_test") r.f_test = s;
    else throw IoError("unknown criteria report field: " + name);
  }
  return r;
}

}  // namespace gwhi

#endif  // GWHI_DATA_HPP
