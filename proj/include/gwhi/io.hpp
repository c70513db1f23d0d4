// include/gwhi/io.hpp

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

#ifndef GWHI_IO_HPP
#define GWHI_IO_HPP

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gwhi/common.hpp"

namespace gwhi {

static_assert(std::endian::native == std::endian::little,
              "binary payloads are little-endian; big-endian hosts unsupported");

namespace fs = std::filesystem;

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Write via a temp file + rename so that re-runs overwrite atomically.
inline void write_file_atomic(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

inline void write_doubles_binary(const fs::path& path, const std::vector<double>& xs) {
  std::string bytes(xs.size() * sizeof(double), '\0');
  std::memcpy(bytes.data(), xs.data(), bytes.size());
  write_file_atomic(path, bytes);
}

inline std::vector<double> read_doubles_binary(const fs::path& path) {
  std::string bytes = read_file(path);
  if (bytes.size() % sizeof(double) != 0)
    throw IoError("binary payload size not a multiple of 8: " + path.string());
  std::vector<double> xs(bytes.size() / sizeof(double));
  std::memcpy(xs.data(), bytes.data(), bytes.size());
  return xs;
}

inline std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

inline std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

inline std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline double parse_double(const std::string& s) {
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str()) throw IoError("not a number: '" + s + "'");
  return v;
}

inline long parse_long(const std::string& s) {
  char* end = nullptr;
  long v = std::strtol(s.c_str(), &end, 10);
  if (end == s.c_str()) throw IoError("not an integer: '" + s + "'");
  return v;
}

/// Tab-separated table with a header row; the workhorse for curve, feature
/// and trace files.
struct Tsv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int col(const std::string& name) const {
    for (size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    throw IoError("missing column '" + name + "'");
  }
};

inline Tsv read_tsv(const fs::path& path) {
  std::istringstream in(read_file(path));
  Tsv t;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto cells = split_on(line, '\t');
    if (first) {
      t.header = cells;
      first = false;
    } else {
      t.rows.push_back(cells);
    }
  }
  return t;
}

class TsvBuilder {
 public:
  explicit TsvBuilder(const std::vector<std::string>& header) { row(header); }
  TsvBuilder& row(const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << '\t';
      out_ << cells[i];
    }
    out_ << '\n';
    return *this;
  }
  std::string str() const { return out_.str(); }
  void write(const fs::path& path) const { write_file_atomic(path, out_.str()); }

 private:
  std::ostringstream out_;
};

/// FNV-1a, used for content-addressed stage stamps.
inline uint64_t fnv1a64(const std::string& bytes, uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace gwhi

#endif  // GWHI_IO_HPP
