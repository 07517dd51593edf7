#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "dirac/config.hpp"
#include "dirac/experiment.hpp"
#include "dirac/identities.hpp"
#include "dirac/report.hpp"

namespace dirac {

/// Limiting point process for a model configuration.
enum class Regime { Clock, Schrodinger, Sine };

inline std::string to_string(Regime r) {
  switch (r) {
    case Regime::Clock: return "clock";
    case Regime::Schrodinger: return "sch";
    case Regime::Sine: return "sine";
  }
  return "?";
}

/// Free or decoupled operators and alpha > 1/2 give the clock; alpha = 1/2 gives
/// Sch (Model I) or Sine (reversed Model II). Other cases have no limit to compare.
inline Regime regime_of(const ModelConfig& c) {
  if (c.model == PotentialModel::Free || c.gamma == 0.0 || c.alpha > 0.5) return Regime::Clock;
  if (c.alpha == 0.5 && c.model == PotentialModel::ModelI) return Regime::Schrodinger;
  if (c.alpha == 0.5 && c.model == PotentialModel::ModelIIReversed) return Regime::Sine;
  throw ConfigError({"no limiting process for model " + model_key(c.model) + " at alpha = " + fmt12(c.alpha) +
                     " (need alpha >= 1/2, and alpha = 1/2 only for models I and II)"});
}

inline double sine_beta(const ExperimentConfig& cfg, double sigma2) {
  return cfg.beta_rule == "matched" ? sine_beta_matched(sigma2) : sine_beta_nominal(sigma2);
}

/// Files produced by one run, keyed by path relative to the output directory.
struct Artifacts {
  std::vector<std::pair<std::string, std::string>> files;

  void add(std::string path, std::string text) { files.emplace_back(std::move(path), std::move(text)); }
};

struct RunResult {
  Report report;
  Artifacts artifacts;
};

namespace detail {

inline CheckResult check(std::string name, double target, double estimate, double se, std::size_t n, bool pass,
                         std::string note = {}) {
  return {std::move(name), target, estimate, se, n, pass, std::move(note)};
}

inline std::string replica_path(std::size_t r) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "replicas/replica_%04zu.csv", r);
  return buf;
}

inline std::string counts_csv(const std::vector<std::string>& names, const std::vector<std::vector<long>>& cols) {
  std::ostringstream os;
  os << "replica";
  for (const auto& n : names) os << ',' << n;
  os << '\n';
  const std::size_t rows = cols.empty() ? 0 : cols[0].size();
  for (std::size_t r = 0; r < rows; ++r) {
    os << r;
    for (const auto& c : cols) os << ',' << c[r];
    os << '\n';
  }
  return os.str();
}

inline std::string values_csv(const std::string& name, const std::vector<double>& v) {
  std::ostringstream os;
  os << "index," << name << '\n';
  for (std::size_t i = 0; i < v.size(); ++i) os << i << ',' << fmt12(v[i]) << '\n';
  return os.str();
}

inline std::vector<double> as_double(const std::vector<long>& v) { return {v.begin(), v.end()}; }

inline void add_ensemble_files(Artifacts& a, const std::vector<PointSet>& ens) {
  for (std::size_t r = 0; r < ens.size(); ++r) {
    std::ostringstream os;
    os << "index,value\n";
    for (std::size_t i = 0; i < ens[r].size(); ++i) os << i << ',' << fmt12(ens[r].points[i]) << '\n';
    a.add(replica_path(r), os.str());
  }
}

inline void add_gap_files(Artifacts& a, const std::string& stem, const std::vector<double>& gaps,
                          const std::string& title) {
  a.add(stem + ".csv", values_csv("gap", gaps));
  a.add(stem + ".svg", histogram_svg(gaps, 32, 0.0, 4.0 * kTwoPi, title));
}

inline void add_count_files(Artifacts& a, const std::string& stem, const std::vector<std::string>& names,
                            const std::vector<std::vector<long>>& cols) {
  a.add(stem + ".csv", counts_csv(names, cols));
  long top = 1;
  for (const auto& c : cols)
    for (long x : c) top = std::max(top, x);
  a.add(stem + ".svg", histogram_svg(as_double(cols.back()), static_cast<std::size_t>(top) + 1, -0.5,
                                     static_cast<double>(top) + 0.5, "counts " + names.back()));
}

}  // namespace detail

// ---------------------------------------------------------------------------

inline RunResult run_dos(const ExperimentConfig& cfg) {
  RunResult out;
  const ModelConfig& c = cfg.model;
  const auto grid = ids_grid(c.m);
  // The free operator does not depend on the seed.
  ModelConfig free = c;
  free.model = PotentialModel::Free;
  free.gamma = 0.0;
  const double err_L = ids_error(free, cfg.dist, cfg.seed);
  ModelConfig half = free;
  half.L = std::max<std::size_t>(2, c.L / 2);
  const double err_half = ids_error(half, cfg.dist, cfg.seed);
  const double bound = 40.0 / static_cast<double>(c.L);
  out.report.tests.push_back(detail::check("ids_sup_error_free", bound, err_L, 0.0, grid.size(), err_L <= bound,
                                           "bound 40/L"));
  const double ratio = err_half / err_L;
  out.report.tests.push_back(detail::check("ids_error_ratio_half_box", 2.0, ratio, 0.0, 2,
                                           ratio >= 1.3 && ratio <= 2.7, "accepted range [1.3, 2.7]"));

  std::vector<double> errs;
  if (c.model != PotentialModel::Free && c.gamma != 0.0) {
    errs = parallel_map(cfg.replicas, cfg.workers,
                        [&](std::size_t r) { return ids_error(c, cfg.dist, derive_seed(cfg.seed, r)); });
    const double worst = *std::max_element(errs.begin(), errs.end());
    const Moments m = moments(errs);
    out.report.tests.push_back(detail::check("ids_sup_error_disordered_max", 0.05, worst, m.stderr_mean, errs.size(),
                                             worst <= 0.05));
  }

  std::ostringstream rep;
  rep << "replica,seed,sup_error\n";
  for (std::size_t r = 0; r < errs.size(); ++r)
    rep << r << ',' << derive_seed(cfg.seed, r) << ',' << fmt12(errs[r]) << '\n';
  out.artifacts.add("replicas.csv", rep.str());

  const auto env = sample_env(cfg.dist, derive_seed(cfg.seed, 0), c.L);
  const auto eigs = eigenvalues(build_matrix(c, potentials_for(c, env)));
  const auto ids = empirical_ids(eigs, c.L, grid);
  std::ostringstream os;
  os << "energy,empirical,closed_form\n";
  for (std::size_t i = 0; i < grid.size(); ++i)
    os << fmt12(grid[i]) << ',' << fmt12(ids.values[i]) << ',' << fmt12(ids_closed_form(grid[i], c.m)) << '\n';
  out.artifacts.add("ids.csv", os.str());
  const double top = band_top(c.m) + 0.5;
  out.artifacts.add("eigenvalues.svg", histogram_svg(eigs, 80, -top, top, "eigenvalues, replica 0"));
  return out;
}

inline RunResult run_spectrum(const ExperimentConfig& cfg) {
  RunResult out;
  const ModelConfig& c = cfg.model;
  const EnergyFrame f = energy_frame(c);
  const double scale = f.rho * static_cast<double>(c.L);
  struct Row {
    std::vector<double> phase, direct;
    double max_diff = 0.0;
    std::size_t violations = 0;
  };
  const auto rows = parallel_map(cfg.replicas, cfg.workers, [&](std::size_t r) {
    Row row;
    const auto env = sample_env(cfg.dist, derive_seed(cfg.seed, r), c.L);
    const auto pot = potentials_for(c, env);
    const PhaseSolver solver(f, pot);
    for (double e : eigenvalues_in(build_matrix(c, pot), f.E + cfg.window_lo / scale, f.E + cfg.window_hi / scale))
      row.direct.push_back(scale * (e - f.E));
    row.phase = solver.solve_spectrum(cfg.window_lo, cfg.window_hi).points;
    if (row.phase.size() != row.direct.size())
      row.max_diff = std::numeric_limits<double>::infinity();
    else
      for (std::size_t i = 0; i < row.phase.size(); ++i)
        row.max_diff = std::max(row.max_diff, std::abs(row.phase[i] - row.direct[i]));
    double prev = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < 50; ++i) {
      const double lam = cfg.window_lo + (cfg.window_hi - cfg.window_lo) * i / 49.0;
      const double v = solver.boundary_phase(lam);
      if (!(v > prev)) ++row.violations;
      prev = v;
    }
    return row;
  });
  double worst = 0.0;
  std::size_t violations = 0, points = 0;
  std::vector<double> gaps;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    worst = std::max(worst, rows[r].max_diff);
    violations += rows[r].violations;
    points += rows[r].direct.size();
    for (std::size_t i = 1; i < rows[r].direct.size(); ++i) gaps.push_back(rows[r].direct[i] - rows[r].direct[i - 1]);
    std::ostringstream os;
    os << "index,phase,eigensolver\n";
    for (std::size_t i = 0; i < std::max(rows[r].phase.size(), rows[r].direct.size()); ++i)
      os << i << ',' << (i < rows[r].phase.size() ? fmt12(rows[r].phase[i]) : "")
         << ',' << (i < rows[r].direct.size() ? fmt12(rows[r].direct[i]) : "") << '\n';
    out.artifacts.add(detail::replica_path(r), os.str());
  }
  out.report.tests.push_back(
      detail::check("phase_vs_eigensolver_max_diff", 1e-6, worst, 0.0, points, worst <= 1e-6, "rescaled units"));
  out.report.tests.push_back(detail::check("boundary_phase_monotone_violations", 0.0, static_cast<double>(violations),
                                           0.0, 50 * rows.size(), violations == 0));
  detail::add_gap_files(out.artifacts, "gaps", gaps, "rescaled gaps (unshifted)");
  return out;
}

inline RunResult run_limits(const ExperimentConfig& cfg) {
  RunResult out;
  const ModelConfig& c = cfg.model;
  const EnergyFrame f = energy_frame(c);
  const double sigma2 = effective_sigma2(f, c.gamma);
  switch (regime_of(c)) {
    case Regime::Clock: {
      const PointSet ps = clock_points(f.eta_L, cfg.window_lo, cfg.window_hi);
      double dev = 0.0;
      for (std::size_t i = 1; i < ps.size(); ++i) dev = std::max(dev, std::abs(ps.points[i] - ps.points[i - 1] - kTwoPi));
      out.report.tests.push_back(detail::check("clock_gap_deviation", 0.0, dev, 0.0, ps.size(), dev <= 1e-12));
      detail::add_ensemble_files(out.artifacts, {ps});
      std::vector<double> gaps;
      for (std::size_t i = 1; i < ps.size(); ++i) gaps.push_back(ps.points[i] - ps.points[i - 1]);
      detail::add_gap_files(out.artifacts, "gaps", gaps, "clock gaps");
      break;
    }
    case Regime::Schrodinger: {
      const auto sch = sch_ensemble(sigma2, cfg.dt, cfg.seed, cfg.replicas, cfg.window_lo, cfg.window_hi, cfg.workers);
      detail::add_ensemble_files(out.artifacts, sch);
      const auto gaps = pooled_gaps(sch);
      detail::add_gap_files(out.artifacts, "gaps", gaps, "Sch gaps, tau = " + fmt12(sigma2));
      const std::size_t n = std::max<std::size_t>(200, cfg.replicas);
      const auto id = shift_identity_samples(1.0, 0.5, sigma2, n, cfg.dt, derive_seed(cfg.seed, 0x5f));
      out.report.tests.push_back(
          detail::check("sch_shift_identity_ks_p", 0.01, id.ks.p_value, 0.0, n, id.ks.p_value >= 0.01));
      const auto sc = scaling_identity_samples(std::sqrt(sigma2), 1.0, n, cfg.dt, derive_seed(cfg.seed, 0x5e));
      out.report.tests.push_back(
          detail::check("sch_scaling_identity_ks_p", 0.01, sc.ks.p_value, 0.0, n, sc.ks.p_value >= 0.01));
      break;
    }
    case Regime::Sine: {
      const double beta = sine_beta(cfg, sigma2);
      const std::vector<double> lam = {0.0, kTwoPi, 2.0 * kTwoPi};
      const auto rows = sine_count_ensemble(beta, lam, sine_horizon(beta, lam.back()), cfg.dt, cfg.seed, cfg.replicas,
                                            cfg.workers);
      std::vector<long> c1, c2;
      for (const auto& r : rows) {
        c1.push_back(r[1] - r[0]);
        c2.push_back(r[2] - r[0]);
      }
      const Moments m1 = moments(detail::as_double(c1)), m2 = moments(detail::as_double(c2));
      out.report.tests.push_back(detail::check("sine_mean_count_2pi", 1.0, m1.mean, m1.stderr_mean, m1.n,
                                               std::abs(m1.mean - 1.0) <= 3.0 * m1.stderr_mean + 1e-12,
                                               "beta = " + fmt12(beta)));
      out.report.tests.push_back(detail::check("sine_mean_count_4pi", 2.0, m2.mean, m2.stderr_mean, m2.n,
                                               std::abs(m2.mean - 2.0) <= 3.0 * m2.stderr_mean + 1e-12,
                                               "beta = " + fmt12(beta)));
      detail::add_count_files(out.artifacts, "counts", {"count_0_2pi", "count_0_4pi"}, {c1, c2});
      break;
    }
  }
  return out;
}

inline RunResult run_compare(const ExperimentConfig& cfg) {
  RunResult out;
  const ModelConfig& c = cfg.model;
  const EnergyFrame f = energy_frame(c);
  const double sigma2 = effective_sigma2(f, c.gamma);
  const auto ens = rescaled_ensemble(c, cfg.dist, cfg.seed, cfg.replicas, cfg.window_lo, cfg.window_hi, cfg.workers);
  detail::add_ensemble_files(out.artifacts, ens);
  const auto gaps = pooled_gaps(ens);
  detail::add_gap_files(out.artifacts, "gaps", gaps, "rescaled gaps");
  const std::vector<std::string> names = {"count_0_2pi", "count_0_4pi"};
  const std::vector<std::vector<long>> dirac_counts = {window_counts(ens, 0.0, kTwoPi),
                                                       window_counts(ens, 0.0, 2.0 * kTwoPi)};

  switch (regime_of(c)) {
    case Regime::Clock: {
      if (gaps.size() < 2) throw std::runtime_error("compare: fewer than two gaps in the window");
      const Moments m = moments(gaps);
      const double sd = std::sqrt(m.variance);
      out.report.tests.push_back(detail::check("clock_mean_gap", kTwoPi, m.mean, m.stderr_mean, m.n,
                                               std::abs(m.mean - kTwoPi) <= 0.02 * kTwoPi, "within 2%"));
      out.report.tests.push_back(
          detail::check("clock_gap_sd", 0.15 * kTwoPi, sd, 0.0, m.n, sd <= 0.15 * kTwoPi, "upper bound"));
      detail::add_count_files(out.artifacts, "counts", names, dirac_counts);
      break;
    }
    case Regime::Schrodinger: {
      const auto sch = sch_ensemble(sigma2, cfg.dt, derive_seed(cfg.seed, 0x5c), cfg.replicas, cfg.window_lo,
                                    cfg.window_hi, cfg.workers);
      const auto sgaps = pooled_gaps(sch);
      const auto ks = ks_two_sample(gaps, sgaps);
      out.report.tests.push_back(detail::check("sch_gap_ks_p", 0.01, ks.p_value, 0.0, gaps.size(), ks.p_value >= 0.01,
                                               "tau = " + fmt12(sigma2) + ", D = " + fmt12(ks.statistic)));
      const std::vector<std::vector<long>> sc = {window_counts(sch, 0.0, kTwoPi), window_counts(sch, 0.0, 2.0 * kTwoPi)};
      for (std::size_t i = 0; i < names.size(); ++i) {
        const auto t = chi2_two_sample(dirac_counts[i], sc[i]);
        out.report.tests.push_back(
            detail::check("sch_" + names[i] + "_chi2_p", 0.01, t.p_value, 0.0, cfg.replicas, t.p_value >= 0.01));
      }
      detail::add_gap_files(out.artifacts, "sch_gaps", sgaps, "Sch gaps, tau = " + fmt12(sigma2));
      detail::add_count_files(out.artifacts, "counts", names, dirac_counts);
      detail::add_count_files(out.artifacts, "sch_counts", names, sc);
      break;
    }
    case Regime::Sine: {
      const double beta = sine_beta(cfg, sigma2);
      const std::vector<double> lam = {0.0, kTwoPi, 2.0 * kTwoPi};
      const auto rows = sine_count_ensemble(beta, lam, sine_horizon(beta, lam.back()), cfg.dt,
                                            derive_seed(cfg.seed, 0x5d), cfg.replicas, cfg.workers);
      std::vector<std::vector<long>> sc(2);
      for (const auto& r : rows) {
        sc[0].push_back(r[1] - r[0]);
        sc[1].push_back(r[2] - r[0]);
      }
      for (std::size_t i = 0; i < names.size(); ++i) {
        const auto t = chi2_two_sample(dirac_counts[i], sc[i]);
        out.report.tests.push_back(detail::check("sine_" + names[i] + "_chi2_p", 0.01, t.p_value, 0.0, cfg.replicas,
                                                 t.p_value >= 0.01, "beta = " + fmt12(beta)));
      }
      detail::add_count_files(out.artifacts, "counts", names, dirac_counts);
      detail::add_count_files(out.artifacts, "sine_counts", names, sc);
      break;
    }
  }
  return out;
}

/// Fast exact checks that need no statistics.
inline RunResult run_validate(const ExperimentConfig& cfg) {
  RunResult out;
  Rng rng(derive_seed(cfg.seed, 0x7a));
  double det_err = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double m = rng.uniform(0.0, 2.0);
    const auto T = transfer_matrix(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-3, 3), m);
    det_err = std::max(det_err, std::abs(T.det() - 1.0));
  }
  out.report.tests.push_back(detail::check("transfer_det_max_error", 1e-12, det_err, 0.0, 10000, det_err <= 1e-12));

  double worst = 0.0;
  std::size_t points = 0;
  for (auto model : {PotentialModel::ModelI, PotentialModel::ModelIIReversed, PotentialModel::ModelII}) {
    for (std::size_t s = 0; s < 5; ++s) {
      ModelConfig c;
      c.model = model;
      c.L = 50;
      const EnergyFrame f = energy_frame(c);
      const auto pot = potentials_for(c, sample_env(cfg.dist, derive_seed(cfg.seed, s), c.L));
      const double scale = f.rho * static_cast<double>(c.L);
      const auto ev = eigenvalues_in(build_matrix(c, pot), f.E - 20.0 / scale, f.E + 20.0 / scale);
      const auto ps = solve_spectrum_by_phase(f, pot, -20.0, 20.0);
      if (ps.size() != ev.size()) {
        worst = std::numeric_limits<double>::infinity();
        continue;
      }
      for (std::size_t i = 0; i < ev.size(); ++i) worst = std::max(worst, std::abs(ps.points[i] - scale * (ev[i] - f.E)));
      points += ev.size();
    }
  }
  out.report.tests.push_back(detail::check("phase_vs_eigensolver_small_box", 1e-6, worst, 0.0, points, worst <= 1e-6));

  ModelConfig free;
  free.model = PotentialModel::Free;
  free.gamma = 0.0;
  free.L = 500;
  const double ids = ids_error(free, cfg.dist, cfg.seed);
  out.report.tests.push_back(detail::check("ids_sup_error_free_L500", 40.0 / 500.0, ids, 0.0, 1, ids <= 40.0 / 500.0));

  const PointSet clock = clock_points(0.3, -6.0 * kPi, 6.0 * kPi);
  const auto g = gap_statistics(clock);
  out.report.tests.push_back(detail::check("clock_gap_variance", 0.0, g.variance, 0.0, g.gaps.size(), g.variance <= 1e-20));

  const std::size_t L = 10000;
  const auto tr = trig_sum_check(dispersion_k(1.0, 0.0), 0.4, 1.0, L);
  const double terr = tr.max_averaged_error();
  out.report.tests.push_back(
      detail::check("trig_sum_max_error", 10.0 / L, terr, 0.0, tr.averaged.size(), terr <= 10.0 / L));
  return out;
}

/// Runs the configured command; artifacts are returned, not written.
inline RunResult run_experiment(const ExperimentConfig& cfg) {
  RunResult r;
  switch (cfg.command) {
    case Command::Dos: r = run_dos(cfg); break;
    case Command::Spectrum: r = run_spectrum(cfg); break;
    case Command::Limits: r = run_limits(cfg); break;
    case Command::Compare: r = run_compare(cfg); break;
    case Command::Validate: r = run_validate(cfg); break;
  }
  r.report.command = to_string(cfg.command);
  r.report.seed = cfg.seed;
  r.report.config_hash = config_hash(cfg);
  return r;
}

/// Writes config echo, report and artifacts under cfg.out.
inline void emit_report(const ExperimentConfig& cfg, const RunResult& r) {
  namespace fs = std::filesystem;
  const fs::path root(cfg.out);
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + root.string() + ": " + ec.message());
  write_text(root / "config.ini", echo_config(cfg));
  write_text(root / "report.json", to_json_string(r.report));
  for (const auto& [rel, text] : r.artifacts.files) {
    const fs::path p = root / rel;
    fs::create_directories(p.parent_path(), ec);
    if (ec) throw std::runtime_error("cannot create " + p.parent_path().string() + ": " + ec.message());
    write_text(p, text);
  }
}

}  // namespace dirac
