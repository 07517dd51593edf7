// dirac_lab: spectral statistics of the decaying random Dirac operator.
//
//   dirac_lab <dos|spectrum|limits|compare|validate> [flags]
//
// Exit status: 0 when every check passes, 1 when a check fails, 2 on usage or
// configuration errors.

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>
#include <map>
#include <string>
#include <utility>

#include "dirac/cli.hpp"

namespace {

struct FlagSpec {
  const char* name;
  const char* key;
  const char* help;
};

constexpr FlagSpec kFlags[] = {
    {"--model", "model", "I, II (reversed), II-forward or free"},
    {"--alpha", "alpha", "decay exponent"},
    {"--gamma", "gamma", "coupling"},
    {"--mass", "mass", "mass m >= 0"},
    {"--energy", "energy", "base energy E in (m, sqrt(m^2+4))"},
    {"--boxlen", "boxlen", "box length L"},
    {"--dist", "dist", "rademacher or uniform"},
    {"--replicas", "replicas", "number of disorder realizations"},
    {"--seed", "seed", "master seed"},
    {"--dt", "dt", "SDE time step"},
    {"--window", "window", "rescaled window a,b"},
    {"--workers", "workers", "worker threads"},
    {"--out", "out", "output directory"},
    {"--beta", "beta", "Sine beta rule: nominal or matched"},
};

int fail_usage(const std::string& msg) {
  std::cerr << "dirac_lab: " << msg << "\n";
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral statistics of the decaying random Dirac operator"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_file;
  app.add_option("--config", config_file, "key=value config file with [model] and [run] sections");
  std::map<std::string, std::string> values;
  for (const auto& f : kFlags) app.add_option(f.name, values[f.key], f.help);

  const std::pair<const char*, const char*> commands[] = {
      {"dos", "integrated density of states against the closed form"},
      {"spectrum", "phase-bisection spectrum against the eigensolver, rescaled gaps"},
      {"limits", "simulate the limiting point process for the configured regime"},
      {"compare", "rescaled spectra against the limiting process"},
      {"validate", "fast self-checks of the numerical building blocks"},
  };
  for (const auto& [cmd, help] : commands) app.add_subcommand(cmd, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  dirac::RawConfig flags;
  for (const auto& f : kFlags)
    if (app.count(f.name) > 0) flags[f.key] = values[f.key];
  flags["command"] = app.get_subcommands().front()->get_name();

  dirac::ExperimentConfig cfg;
  try {
    const dirac::RawConfig file = config_file.empty() ? dirac::RawConfig{} : dirac::read_config_file(config_file);
    cfg = dirac::parse_config(file, flags);
  } catch (const dirac::ConfigError& e) {
    return fail_usage(std::string("invalid configuration:\n") + e.what());
  }

  dirac::RunResult result;
  try {
    result = dirac::run_experiment(cfg);
    dirac::emit_report(cfg, result);
  } catch (const dirac::ConfigError& e) {
    return fail_usage(std::string("invalid configuration:\n") + e.what());
  } catch (const dirac::EnergyError& e) {
    return fail_usage(e.what());
  } catch (const std::exception& e) {
    std::cerr << "dirac_lab: " << e.what() << "\n";
    return 1;
  }

  nlohmann::ordered_json failed = nlohmann::ordered_json::array();
  for (const auto& t : result.report.tests) {
    std::cout << (t.pass ? "PASS " : "FAIL ") << t.test_name << "  estimate=" << dirac::fmt12(t.estimate)
              << " target=" << dirac::fmt12(t.target) << "\n";
    if (!t.pass) failed.push_back(t.test_name);
  }
  std::cout << "report: " << cfg.out << "/report.json\n";
  if (!failed.empty()) {
    std::cerr << nlohmann::ordered_json{{"failed", failed}}.dump() << "\n";
    return 1;
  }
  return 0;
}
