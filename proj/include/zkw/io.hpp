#pragma once

// Serialization and small numerics utilities: 17-significant-digit CSV
// emission, FNV-1a digests, coefficient-field JSON round-tripping, result
// manifests, and least-squares fits used by the experiment reports.

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "zkw/errors.hpp"
#include "zkw/lattice.hpp"

namespace zkw {

inline std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct CsvBuilder {
  std::string data;
  std::size_t ncols = 0;

  explicit CsvBuilder(const std::vector<std::string>& header) : ncols(header.size()) {
    append_cells(header);
  }
  void comment(const std::string& line) {
    data.insert(0, "# " + line + "\n");
  }
  void row(const std::vector<std::string>& cells) {
    if (cells.size() != ncols) throw IoError("csv row width mismatch");
    append_cells(cells);
  }
  static std::string num(double v) { return g17(v); }
  static std::string num(std::int64_t v) { return std::to_string(v); }

 private:
  void append_cells(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) data += ',';
      data += cells[i];
    }
    data += '\n';
  }
};

inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex16(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out.write(content.data(), std::streamsize(content.size()));
  if (!out) throw IoError("short write: " + path);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// coefficient-field JSON: nonzero entries sorted lexicographically by (a,b)

inline nlohmann::json grid_to_json(const GridFunction& f) {
  nlohmann::json entries = nlohmann::json::array();
  const std::int64_t bound = f.lattice().index_bound();
  for (std::int64_t a = -bound; a <= bound; ++a)
    for (std::int64_t b = -bound; b <= bound; ++b) {
      const cplx v = f.get(a, b);
      if (v != cplx(0, 0))
        entries.push_back({{"a", a}, {"b", b}, {"re", v.real()}, {"im", v.imag()}});
    }
  return {{"lambda", f.lattice().lambda},
          {"radius", f.lattice().truncation_radius},
          {"entries", entries}};
}

inline GridFunction grid_from_json(const nlohmann::json& j) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (it.key() != "lambda" && it.key() != "radius" && it.key() != "entries")
      throw ConfigInvalid("unknown key in coefficient field: " + it.key());
  DualLattice lat{j.at("lambda").get<std::int64_t>(), j.at("radius").get<std::int64_t>()};
  GridFunction f(lat);
  for (const auto& e : j.at("entries"))
    f.at(e.at("a").get<std::int64_t>(), e.at("b").get<std::int64_t>()) =
        cplx(e.at("re").get<double>(), e.at("im").get<double>());
  return f;
}

// ---------------------------------------------------------------------------
// result manifest

struct ResultManifest {
  std::string experiment;
  std::string config_hash;
  std::map<std::string, std::string> file_digests;
  std::map<std::string, double> metrics;

  nlohmann::json to_json() const {
    return {{"experiment", experiment},
            {"config_hash", config_hash},
            {"files", file_digests},
            {"metrics", metrics}};
  }
  static ResultManifest from_json(const nlohmann::json& j) {
    ResultManifest m;
    m.experiment = j.at("experiment").get<std::string>();
    m.config_hash = j.at("config_hash").get<std::string>();
    for (const auto& [k, v] : j.at("files").items())
      m.file_digests[k] = v.get<std::string>();
    for (const auto& [k, v] : j.at("metrics").items()) m.metrics[k] = v.get<double>();
    return m;
  }
};

struct ManifestDiff {
  bool identical = true;
  std::vector<std::string> lines;
};

inline ManifestDiff compare_manifests(const ResultManifest& a, const ResultManifest& b) {
  if (a.experiment != b.experiment)
    throw ManifestMismatch("different experiments: " + a.experiment + " vs " + b.experiment);
  ManifestDiff d;
  auto note = [&](const std::string& s) {
    d.identical = false;
    d.lines.push_back(s);
  };
  if (a.config_hash != b.config_hash)
    note("config hash: " + a.config_hash + " -> " + b.config_hash);
  for (const auto& [k, v] : a.file_digests) {
    auto it = b.file_digests.find(k);
    if (it == b.file_digests.end())
      note("file only in first: " + k);
    else if (it->second != v)
      note("file differs: " + k);
  }
  for (const auto& [k, v] : b.file_digests)
    if (!a.file_digests.count(k)) note("file only in second: " + k);
  for (const auto& [k, v] : a.metrics) {
    auto it = b.metrics.find(k);
    if (it == b.metrics.end())
      note("metric only in first: " + k);
    else if (it->second != v)
      note("metric " + k + ": " + g17(v) + " -> " + g17(it->second) +
           " (delta " + g17(it->second - v) + ")");
  }
  for (const auto& [k, v] : b.metrics)
    if (!a.metrics.count(k)) note("metric only in second: " + k);
  return d;
}

// ---------------------------------------------------------------------------
// least-squares helpers

inline std::array<double, 2> linear_fit(const std::vector<double>& xs,
                                        const std::vector<double>& ys) {
  const double n = double(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return {slope, (sy - slope * sx) / n};
}

inline double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    lx.push_back(std::log(xs[i]));
    ly.push_back(std::log(ys[i]));
  }
  return linear_fit(lx, ly)[0];
}

}  // namespace zkw
