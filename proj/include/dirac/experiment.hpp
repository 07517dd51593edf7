#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "dirac/disorder.hpp"
#include "dirac/limits.hpp"
#include "dirac/operator.hpp"
#include "dirac/parallel.hpp"
#include "dirac/point_set.hpp"
#include "dirac/pruefer.hpp"
#include "dirac/rng.hpp"
#include "dirac/stats.hpp"
#include "dirac/tridiagonal.hpp"

namespace dirac {

// Ensemble drivers shared by the command-line tool and the acceptance suite.
// Replica r always uses derive_seed(seed, r), so results do not depend on the
// number of workers.

inline PointSet rescaled_replica(const ModelConfig& c, Distribution dist, std::uint64_t seed, double lo, double hi) {
  const EnergyFrame f = energy_frame(c);
  const auto env = sample_env(dist, seed, c.L);
  const auto pot = potentials_for(c, env);
  const auto B = build_matrix(c, pot);
  const auto [elo, ehi] = energy_window(f, lo, hi);
  return rescale_spectrum(eigenvalues_in(B, elo, ehi), f, lo, hi, seed);
}

inline std::vector<PointSet> rescaled_ensemble(const ModelConfig& c, Distribution dist, std::uint64_t seed,
                                               std::size_t replicas, double lo, double hi,
                                               std::size_t workers = default_workers()) {
  return parallel_map(replicas, workers,
                      [&](std::size_t r) { return rescaled_replica(c, dist, derive_seed(seed, r), lo, hi); });
}

inline std::vector<PointSet> sch_ensemble(double tau, double dt, std::uint64_t seed, std::size_t replicas, double lo,
                                          double hi, std::size_t workers = default_workers(),
                                          const SchOptions& opt = {}) {
  return parallel_map(replicas, workers, [&](std::size_t r) {
    return extract_sch_points(tau, dt, derive_seed(seed, r), lo, hi, opt);
  });
}

/// alpha_infinity / 2 pi at each lambda, one row per replica.
inline std::vector<std::vector<long>> sine_count_ensemble(double beta, const std::vector<double>& lambdas, double T,
                                                          double dt, std::uint64_t seed, std::size_t replicas,
                                                          std::size_t workers = default_workers(),
                                                          const SineOptions& opt = {}) {
  return parallel_map(replicas, workers, [&](std::size_t r) {
    return simulate_sine_family(lambdas, beta, T, dt, derive_seed(seed, r), opt).alpha_inf;
  });
}

inline std::vector<double> pooled_gaps(const std::vector<PointSet>& ensemble) {
  std::vector<double> g;
  for (const auto& ps : ensemble)
    for (std::size_t i = 1; i < ps.size(); ++i) g.push_back(ps.points[i] - ps.points[i - 1]);
  return g;
}

inline std::vector<long> window_counts(const std::vector<PointSet>& ensemble, double a, double b) {
  std::vector<long> c;
  c.reserve(ensemble.size());
  for (const auto& ps : ensemble) c.push_back(static_cast<long>(ps.count_in(a, b)));
  return c;
}

/// Sup-grid distance between the empirical IDS of one realization and the closed form.
inline double ids_error(const ModelConfig& c, Distribution dist, std::uint64_t seed, std::size_t grid_points = 2001) {
  const auto env = sample_env(dist, seed, c.L);
  const auto pot = potentials_for(c, env);
  const auto eigs = eigenvalues(build_matrix(c, pot));
  return ids_sup_error(empirical_ids(eigs, c.L, ids_grid(c.m, grid_points)), c.m);
}

/// Box eigenfunction profiles for eigenvalues whose rescaled value lies in [lo, hi].
inline std::vector<EigenfunctionProfile> profile_replica(const ModelConfig& c, Distribution dist, std::uint64_t seed,
                                                         double lo, double hi) {
  const EnergyFrame f = energy_frame(c);
  const auto env = sample_env(dist, seed, c.L);
  const auto pot = potentials_for(c, env);
  const auto B = build_matrix(c, pot);
  const double scale = f.rho * static_cast<double>(c.L);
  const auto pairs = eigenpairs_in(B, f.E + lo / scale, f.E + hi / scale);
  std::vector<EigenfunctionProfile> out;
  for (std::size_t i = 0; i < pairs.values.size(); ++i)
    out.push_back(eigenfunction_profile(pairs.vectors[i], c.L, scale * (pairs.values[i] - f.E)));
  return out;
}

}  // namespace dirac
