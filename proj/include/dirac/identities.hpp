#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "dirac/limits.hpp"
#include "dirac/rng.hpp"
#include "dirac/stats.hpp"

namespace dirac {

/// Two samples that should agree in law, plus their KS comparison.
struct IdentitySamples {
  std::vector<double> lhs;
  std::vector<double> rhs;
  TestResult ks;
};

/// vartheta^lambda(1) of the Model I pair with noise sigma against
/// vartheta^{lambda/sigma^2}(sigma^2) of the unit-noise equation.
inline IdentitySamples scaling_identity_samples(double sigma, double lambda, std::size_t n, double dt,
                                                std::uint64_t seed) {
  if (!(sigma > 0.0)) throw std::invalid_argument("scaling_identity_samples: sigma must be > 0");
  IdentitySamples out;
  const double tau = sigma * sigma;
  for (std::size_t i = 0; i < n; ++i) {
    const auto a = simulate_model1_pair({lambda}, sigma, dt, derive_seed(seed, 1, i));
    // drift lambda/tau over [0, tau]
    const auto b = simulate_schrodinger_family({lambda}, tau, dt, derive_seed(seed, 2, i));
    out.lhs.push_back(a.phase[0][0]);
    out.rhs.push_back(b.phase[0][0]);
  }
  out.ks = ks_two_sample(out.lhs, out.rhs);
  return out;
}

/// phi^{lambda-theta}(t) + theta t against phi^lambda(t), unit noise, independent tapes.
inline IdentitySamples shift_identity_samples(double lambda, double theta, double t, std::size_t n, double dt,
                                              std::uint64_t seed, const SchOptions& opt = {}) {
  IdentitySamples out;
  const std::size_t steps = steps_for(t, dt);
  const double T = static_cast<double>(steps) * dt;
  for (std::size_t i = 0; i < n; ++i) {
    const NoiseTape ta(derive_seed(seed, 1, i), steps, dt);
    const NoiseTape tb(derive_seed(seed, 2, i), steps, dt);
    out.lhs.push_back(integrate_phase(lambda - theta, ta, steps, opt) + theta * T);
    out.rhs.push_back(integrate_phase(lambda, tb, steps, opt));
  }
  out.ks = ks_two_sample(out.lhs, out.rhs);
  return out;
}

}  // namespace dirac
