#pragma once

#include <cmath>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dirac/rng.hpp"

namespace dirac {

enum class Distribution { Rademacher, UniformSym };

enum class PotentialModel {
  ModelI,           ///< gamma * omega / L^alpha
  ModelII,          ///< gamma * omega / n^alpha
  ModelIIReversed,  ///< envelope mirrored towards the right edge
  Free,
};

inline std::string_view to_string(Distribution d) {
  return d == Distribution::Rademacher ? "rademacher" : "uniform";
}

inline std::string_view to_string(PotentialModel m) {
  switch (m) {
    case PotentialModel::ModelI: return "I";
    case PotentialModel::ModelII: return "II";
    case PotentialModel::ModelIIReversed: return "II-reversed";
    case PotentialModel::Free: return "free";
  }
  return "?";
}

/// i.i.d. field omega_{n,i}, n = 1..L+1, stored 0-based (index n-1).
struct DisorderRealization {
  std::uint64_t seed = 0;
  Distribution dist = Distribution::Rademacher;
  std::vector<double> omega1;
  std::vector<double> omega2;

  [[nodiscard]] std::size_t size() const { return omega1.size(); }
  /// omega_{n,1} for 1-based site n.
  [[nodiscard]] double w1(std::size_t n) const { return omega1.at(n - 1); }
  [[nodiscard]] double w2(std::size_t n) const { return omega2.at(n - 1); }
};

inline double sample_one(Distribution dist, Rng& rng) {
  if (dist == Distribution::Rademacher) return rng.rademacher();
  static const double half_width = std::sqrt(3.0);
  return rng.uniform(-half_width, half_width);
}

/// Draws L+1 pairs. Deterministic in (dist, seed, L); prefixes are shared
/// across L because each component uses its own stream.
inline DisorderRealization sample_env(Distribution dist, std::uint64_t seed, std::size_t L) {
  if (L < 1) throw std::invalid_argument("sample_env: L must be >= 1");
  DisorderRealization out;
  out.seed = seed;
  out.dist = dist;
  out.omega1.resize(L + 1);
  out.omega2.resize(L + 1);
  Rng rng1(derive_seed(seed, 1));
  Rng rng2(derive_seed(seed, 2));
  for (std::size_t n = 0; n <= L; ++n) {
    out.omega1[n] = sample_one(dist, rng1);
    out.omega2[n] = sample_one(dist, rng2);
  }
  return out;
}

/// Site potentials V_1(n), V_2(n) for n = 1..L, stored 0-based.
///
/// For ModelIIReversed the envelope follows the transfer-step indexing: step j
/// carries (L-j)^-alpha on both omega_{j,1} and omega_{j+1,2}, so site n sees
/// (L-n)^-alpha on component 1 and (L-n+1)^-alpha on component 2. V_1(L) sits
/// on the removed phi^+_L and is stored as 0.
struct PotentialSequence {
  PotentialModel model = PotentialModel::Free;
  double alpha = 0.0;
  double gamma = 0.0;
  std::size_t L = 0;
  std::vector<double> v1;
  std::vector<double> v2;

  [[nodiscard]] double V1(std::size_t n) const { return v1.at(n - 1); }
  [[nodiscard]] double V2(std::size_t n) const { return v2.at(n - 1); }
};

/// Envelope factor multiplying gamma * omega at 1-based site n.
inline double envelope(PotentialModel model, std::size_t n, std::size_t L, double alpha) {
  switch (model) {
    case PotentialModel::ModelI: return std::pow(static_cast<double>(L), -alpha);
    case PotentialModel::ModelII: return std::pow(static_cast<double>(n), -alpha);
    case PotentialModel::ModelIIReversed:
      if (n >= L) throw std::domain_error("reversed envelope is singular at n = L");
      return std::pow(static_cast<double>(L - n), -alpha);
    case PotentialModel::Free: return 0.0;
  }
  return 0.0;
}

inline PotentialSequence potential_sequence(PotentialModel model, const DisorderRealization& env,
                                            std::size_t L, double alpha, double gamma) {
  if (model != PotentialModel::Free && !(alpha > 0.0))
    throw std::invalid_argument("potential_sequence: alpha must be > 0");
  if (!(gamma >= 0.0)) throw std::invalid_argument("potential_sequence: gamma must be >= 0");
  PotentialSequence p;
  p.model = model;
  p.alpha = alpha;
  p.gamma = gamma;
  p.L = L;
  p.v1.assign(L, 0.0);
  p.v2.assign(L, 0.0);
  if (model == PotentialModel::Free) return p;
  if (env.size() < L) throw std::invalid_argument("potential_sequence: realization shorter than L");
  for (std::size_t n = 1; n <= L; ++n) {
    if (model == PotentialModel::ModelIIReversed) {
      p.v1[n - 1] = n < L ? gamma * env.w1(n) * envelope(model, n, L, alpha) : 0.0;
      p.v2[n - 1] = gamma * env.w2(n) * std::pow(static_cast<double>(L - n + 1), -alpha);
    } else {
      const double e = envelope(model, n, L, alpha);
      p.v1[n - 1] = gamma * env.w1(n) * e;
      p.v2[n - 1] = gamma * env.w2(n) * e;
    }
  }
  return p;
}

/// CSV (n, omega1, omega2) for audit.
inline void write_realization_csv(std::ostream& os, const DisorderRealization& env) {
  os.precision(17);
  os << "# seed=" << env.seed << " dist=" << to_string(env.dist) << "\n";
  os << "n,omega1,omega2\n";
  for (std::size_t n = 1; n <= env.size(); ++n) os << n << ',' << env.w1(n) << ',' << env.w2(n) << '\n';
}

}  // namespace dirac
