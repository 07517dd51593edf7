#pragma once

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dirac/point_set.hpp"

#ifndef DIRAC_BUILD_ID
#define DIRAC_BUILD_ID "unknown"
#endif

namespace dirac {

struct CheckResult {
  std::string test_name;
  double target = 0.0;
  double estimate = 0.0;
  double stderr_ = 0.0;
  std::size_t n = 0;
  bool pass = false;
  std::string note;
};

struct Report {
  std::string command;
  std::uint64_t seed = 0;
  std::string build_id = DIRAC_BUILD_ID;
  std::string config_hash;
  std::vector<CheckResult> tests;

  [[nodiscard]] bool all_pass() const {
    return std::all_of(tests.begin(), tests.end(), [](const CheckResult& c) { return c.pass; });
  }
};

/// x rounded to 12 significant digits.
inline double round12(double x) {
  if (!std::isfinite(x) || x == 0.0) return x;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

inline std::string fmt12(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

/// 64-bit FNV-1a, as 16 hex digits.
inline std::string fnv1a_hex(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace detail {
inline nlohmann::ordered_json number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return round12(x);
}
}  // namespace detail

inline nlohmann::ordered_json to_json(const CheckResult& c) {
  nlohmann::ordered_json j;
  j["test_name"] = c.test_name;
  j["target"] = detail::number(c.target);
  j["estimate"] = detail::number(c.estimate);
  j["stderr"] = detail::number(c.stderr_);
  j["n"] = c.n;
  j["pass"] = c.pass;
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

inline std::string to_json_string(const Report& r) {
  nlohmann::ordered_json j;
  j["command"] = r.command;
  j["seed"] = r.seed;
  j["build_id"] = r.build_id;
  j["config_hash"] = r.config_hash;
  j["pass"] = r.all_pass();
  j["tests"] = nlohmann::ordered_json::array();
  for (const auto& c : r.tests) j["tests"].push_back(to_json(c));
  return j.dump(2) + "\n";
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  os << text;
  if (!os) throw std::runtime_error("write failed for " + p.string());
}

/// One row per point: replica,index,value.
inline std::string points_csv(const std::vector<PointSet>& ensemble) {
  std::ostringstream os;
  os << "replica,seed,index,value\n";
  for (std::size_t r = 0; r < ensemble.size(); ++r)
    for (std::size_t i = 0; i < ensemble[r].size(); ++i)
      os << r << ',' << ensemble[r].seed << ',' << i << ',' << fmt12(ensemble[r].points[i]) << '\n';
  return os.str();
}

/// Histogram on `bins` equal cells of [lo, hi] rendered as a bar chart.
inline std::string histogram_svg(const std::vector<double>& values, std::size_t bins, double lo, double hi,
                                 const std::string& title) {
  if (bins == 0 || !(hi > lo)) throw std::invalid_argument("histogram_svg: bad binning");
  std::vector<std::size_t> h(bins, 0);
  for (double v : values) {
    if (v < lo || v > hi) continue;
    auto k = static_cast<std::size_t>((v - lo) / (hi - lo) * static_cast<double>(bins));
    ++h[std::min(k, bins - 1)];
  }
  const std::size_t top = std::max<std::size_t>(1, *std::max_element(h.begin(), h.end()));
  const double W = 480, H = 300, pad = 40;
  const double bw = (W - 2 * pad) / static_cast<double>(bins);
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  os << "<text x=\"" << pad << "\" y=\"20\" font-size=\"14\">" << title << "</text>\n";
  for (std::size_t k = 0; k < bins; ++k) {
    if (h[k] == 0) continue;
    const double bh = (H - 2 * pad) * static_cast<double>(h[k]) / static_cast<double>(top);
    os << "<rect class=\"bar\" x=\"" << fmt12(pad + bw * static_cast<double>(k)) << "\" y=\""
       << fmt12(H - pad - bh) << "\" width=\"" << fmt12(bw) << "\" height=\"" << fmt12(bh)
       << "\" fill=\"steelblue\"/>\n";
  }
  os << "<line x1=\"" << pad << "\" y1=\"" << H - pad << "\" x2=\"" << W - pad << "\" y2=\"" << H - pad
     << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << pad << "\" y=\"" << H - pad + 16 << "\" font-size=\"11\">" << fmt12(lo) << "</text>\n";
  os << "<text x=\"" << W - pad - 40 << "\" y=\"" << H - pad + 16 << "\" font-size=\"11\">" << fmt12(hi)
     << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace dirac
