#pragma once

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dirac/disorder.hpp"
#include "dirac/operator.hpp"
#include "dirac/parallel.hpp"
#include "dirac/report.hpp"

namespace dirac {

enum class Command { Dos, Spectrum, Limits, Compare, Validate };

inline std::string to_string(Command c) {
  switch (c) {
    case Command::Dos: return "dos";
    case Command::Spectrum: return "spectrum";
    case Command::Limits: return "limits";
    case Command::Compare: return "compare";
    case Command::Validate: return "validate";
  }
  return "?";
}

/// Invalid configuration; what() lists every problem, one per line.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::vector<std::string>& problems)
      : std::invalid_argument(join(problems)), problems_(problems) {}
  [[nodiscard]] const std::vector<std::string>& problems() const { return problems_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (const auto& p : v) s += (s.empty() ? "" : "\n") + p;
    return s;
  }
  std::vector<std::string> problems_;
};

struct ExperimentConfig {
  Command command = Command::Validate;
  ModelConfig model;
  bool energy_set = false;
  Distribution dist = Distribution::Rademacher;
  std::size_t replicas = 100;
  std::uint64_t seed = 1;
  double window_lo = -6.0 * kPi;
  double window_hi = 6.0 * kPi;
  double dt = 1e-3;
  std::size_t workers = 1;
  std::string out;
  std::string beta_rule = "nominal";  ///< nominal (2/sigma^2) or matched (4/sigma^2)
};

/// Keys accepted in each section; the empty section holds `command`.
inline const std::map<std::string, std::vector<std::string>>& config_schema() {
  static const std::map<std::string, std::vector<std::string>> s = {
      {"", {"command"}},
      {"model", {"model", "mass", "energy", "alpha", "gamma", "boxlen", "dist"}},
      {"run", {"replicas", "seed", "dt", "window", "workers", "out", "beta"}},
  };
  return s;
}

/// Section owning a key, or nullopt for unknown keys.
inline std::optional<std::string> section_of(const std::string& key) {
  for (const auto& [sec, keys] : config_schema())
    for (const auto& k : keys)
      if (k == key) return sec;
  return std::nullopt;
}

using RawConfig = std::map<std::string, std::string>;

/// Reads a flat key=value file with optional [model] / [run] sections.
inline RawConfig read_config_file(const std::string& path) {
  boost::property_tree::ptree pt;
  try {
    boost::property_tree::ini_parser::read_ini(path, pt);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError({std::string("config file: ") + e.what()});
  }
  RawConfig raw;
  std::vector<std::string> problems;
  for (const auto& [name, node] : pt) {
    if (node.empty()) {
      auto sec = section_of(name);
      if (!sec)
        problems.push_back("unknown key '" + name + "'");
      else if (!sec->empty())
        problems.push_back("key '" + name + "' belongs in section [" + *sec + "]");
      else
        raw[name] = node.data();
      continue;
    }
    if (!config_schema().count(name) || name.empty()) {
      problems.push_back("unknown section [" + name + "]");
      continue;
    }
    for (const auto& [key, leaf] : node) {
      auto sec = section_of(key);
      if (!sec)
        problems.push_back("unknown key '" + name + "." + key + "'");
      else if (*sec != name)
        problems.push_back("key '" + key + "' belongs in section [" + *sec + "], found in [" + name + "]");
      else
        raw[key] = leaf.data();
    }
  }
  if (!problems.empty()) throw ConfigError(problems);
  return raw;
}

namespace detail {

inline bool parse_double(const std::string& s, double& out) {
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end != s.c_str() && *end == '\0' && std::isfinite(out);
}

inline bool parse_uint(const std::string& s, std::uint64_t& out) {
  if (s.empty() || s[0] == '-') return false;
  char* end = nullptr;
  out = std::strtoull(s.c_str(), &end, 10);
  return *end == '\0';
}

}  // namespace detail

inline std::optional<PotentialModel> parse_model(const std::string& s) {
  if (s == "I") return PotentialModel::ModelI;
  if (s == "II" || s == "II-reversed") return PotentialModel::ModelIIReversed;
  if (s == "II-forward") return PotentialModel::ModelII;
  if (s == "free") return PotentialModel::Free;
  return std::nullopt;
}

inline std::string model_key(PotentialModel m) {
  switch (m) {
    case PotentialModel::ModelI: return "I";
    case PotentialModel::ModelIIReversed: return "II";
    case PotentialModel::ModelII: return "II-forward";
    case PotentialModel::Free: return "free";
  }
  return "?";
}

inline std::optional<Command> parse_command(const std::string& s) {
  for (Command c : {Command::Dos, Command::Spectrum, Command::Limits, Command::Compare, Command::Validate})
    if (to_string(c) == s) return c;
  return std::nullopt;
}

/// Builds a validated config from file values overlaid with flag values.
/// Every problem is collected before throwing.
inline ExperimentConfig parse_config(const RawConfig& file, const RawConfig& flags) {
  RawConfig raw = file;
  for (const auto& [k, v] : flags) raw[k] = v;
  std::vector<std::string> bad;
  ExperimentConfig c;
  for (const auto& [k, v] : raw)
    if (!section_of(k)) bad.push_back("unknown key '" + k + "'");

  auto get = [&](const std::string& k) -> std::optional<std::string> {
    auto it = raw.find(k);
    if (it == raw.end()) return std::nullopt;
    return it->second;
  };
  auto num = [&](const std::string& k, double& dst) {
    if (auto v = get(k)) {
      if (!detail::parse_double(*v, dst)) bad.push_back(k + ": not a number ('" + *v + "')");
      return true;
    }
    return false;
  };
  auto count = [&](const std::string& k, std::uint64_t& dst) {
    if (auto v = get(k))
      if (!detail::parse_uint(*v, dst)) bad.push_back(k + ": not a nonnegative integer ('" + *v + "')");
  };

  if (auto v = get("command")) {
    if (auto cmd = parse_command(*v))
      c.command = *cmd;
    else
      bad.push_back("command: unknown command '" + *v + "'");
  } else {
    bad.push_back("command required");
  }
  if (auto v = get("model")) {
    if (auto m = parse_model(*v))
      c.model.model = *m;
    else
      bad.push_back("model: expected I, II, II-forward or free");
  }
  if (auto v = get("dist")) {
    if (*v == "rademacher")
      c.dist = Distribution::Rademacher;
    else if (*v == "uniform")
      c.dist = Distribution::UniformSym;
    else
      bad.push_back("dist: expected rademacher or uniform");
  }
  num("mass", c.model.m);
  c.energy_set = num("energy", c.model.E);
  num("alpha", c.model.alpha);
  num("gamma", c.model.gamma);
  num("dt", c.dt);
  std::uint64_t L = 2000, reps = c.replicas, workers = default_workers(), seed = c.seed;
  count("boxlen", L);
  count("replicas", reps);
  count("workers", workers);
  count("seed", seed);
  c.model.L = static_cast<std::size_t>(L);
  c.replicas = static_cast<std::size_t>(reps);
  c.workers = static_cast<std::size_t>(workers);
  c.seed = seed;
  if (auto v = get("window")) {
    const auto comma = v->find(',');
    double a = 0, b = 0;
    if (comma == std::string::npos || !detail::parse_double(v->substr(0, comma), a) ||
        !detail::parse_double(v->substr(comma + 1), b))
      bad.push_back("window: expected 'a,b'");
    else {
      c.window_lo = a;
      c.window_hi = b;
    }
  }
  if (auto v = get("beta")) {
    if (*v == "nominal" || *v == "matched")
      c.beta_rule = *v;
    else
      bad.push_back("beta: expected nominal or matched");
  }
  if (auto v = get("out")) c.out = *v;

  // Range checks.
  const double m = c.model.m;
  if (!(m >= 0.0)) bad.push_back("mass must be >= 0");
  const bool needs_energy = c.command == Command::Spectrum || c.command == Command::Compare ||
                            c.command == Command::Limits;
  if (needs_energy && !c.energy_set) bad.push_back("E required (energy) for command " + to_string(c.command));
  if (c.energy_set || needs_energy) {
    const double E = c.model.E;
    if (m >= 0.0 && !(E > m && E < band_top(m)))
      bad.push_back("energy must lie in the open band (m, sqrt(m^2+4))");
    else if (m >= 0.0 && std::abs(E - std::sqrt(m * m + 2.0)) < 1e-9)
      bad.push_back("excluded energy E = sqrt(m^2+2)");
  }
  if (c.model.model != PotentialModel::Free && !(c.model.alpha > 0.0)) bad.push_back("alpha must be > 0");
  if (!(c.model.gamma >= 0.0)) bad.push_back("gamma must be >= 0");
  if (c.model.L < 2) bad.push_back("boxlen must be >= 2");
  if (c.replicas < 1) bad.push_back("replicas must be >= 1");
  if (c.workers < 1) bad.push_back("workers must be >= 1");
  if (!(c.dt > 0.0)) bad.push_back("dt must be > 0");
  if (!(c.window_lo < c.window_hi)) bad.push_back("window must satisfy a < b");

  if (!bad.empty()) throw ConfigError(bad);
  if (c.out.empty()) {
    const char* root = std::getenv("DIRAC_LAB_OUT");
    c.out = std::string(root && *root ? root : "dirac_out") + "/" + to_string(c.command);
  }
  return c;
}

/// Canonical text form. The hash covers only settings that affect results, so
/// it leaves out the worker count and the output directory.
inline std::string echo_config(const ExperimentConfig& c, bool runtime = true) {
  std::ostringstream os;
  os << "command = " << to_string(c.command) << "\n\n[model]\n";
  os << "model = " << model_key(c.model.model) << "\n";
  os << "mass = " << fmt12(c.model.m) << "\n";
  if (c.energy_set) os << "energy = " << fmt12(c.model.E) << "\n";
  os << "alpha = " << fmt12(c.model.alpha) << "\n";
  os << "gamma = " << fmt12(c.model.gamma) << "\n";
  os << "boxlen = " << c.model.L << "\n";
  os << "dist = " << to_string(c.dist) << "\n\n[run]\n";
  os << "replicas = " << c.replicas << "\n";
  os << "seed = " << c.seed << "\n";
  os << "dt = " << fmt12(c.dt) << "\n";
  os << "window = " << fmt12(c.window_lo) << "," << fmt12(c.window_hi) << "\n";
  os << "beta = " << c.beta_rule << "\n";
  if (runtime) os << "workers = " << c.workers << "\nout = " << c.out << "\n";
  return os.str();
}

inline std::string config_hash(const ExperimentConfig& c) { return fnv1a_hex(echo_config(c, false)); }

}  // namespace dirac
