#pragma once

#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dirac/errors.hpp"
#include "dirac/operator.hpp"
#include "dirac/point_set.hpp"
#include "dirac/rng.hpp"

namespace dirac {

/// Points of 2 pi Z + pi + 2 eta inside [lo, hi].
inline PointSet clock_points(double eta, double lo, double hi) {
  if (!(std::isfinite(lo) && std::isfinite(hi))) throw std::invalid_argument("clock_points: window must be finite");
  const double base = kPi + reduce_2pi(2.0 * eta);
  std::vector<double> pts;
  for (auto n = static_cast<long>(std::ceil((lo - base) / kTwoPi)); base + kTwoPi * static_cast<double>(n) <= hi; ++n)
    pts.push_back(base + kTwoPi * static_cast<double>(n));
  return PointSet(std::move(pts), Provenance::Clock, eta);
}

/// Sign of the phase inside Re{e^{-+ i phi} dB}.
enum class NoisePhase { Minus, Plus };

/// Pre-drawn Gaussian increments (B1, B2, W) of variance dt, one triple per step.
/// Every member of a lambda-family reads the same tape.
struct NoiseTape {
  double dt = 0.0;
  std::size_t steps = 0;
  std::uint64_t seed = 0;
  bool zero = false;
  std::vector<double> b1, b2, w;

  NoiseTape() = default;
  NoiseTape(std::uint64_t s, std::size_t n, double step, bool zero_noise = false)
      : dt(step), steps(n), seed(s), zero(zero_noise), b1(n, 0.0), b2(n, 0.0), w(n, 0.0) {
    if (!(step > 0.0)) throw std::invalid_argument("NoiseTape: dt must be > 0");
    if (zero_noise) return;
    Rng rng(s);
    const double sd = std::sqrt(step);
    for (std::size_t i = 0; i < n; ++i) {
      b1[i] = sd * rng.normal();
      b2[i] = sd * rng.normal();
      w[i] = sd * rng.normal();
    }
  }
};

inline std::size_t steps_for(double horizon, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be > 0");
  return static_cast<std::size_t>(std::ceil(horizon / dt - 1e-9));
}

/// Re{e^{-i phi} dB} with dB = (dB2 + i dB1)/sqrt(2).
inline double re_noise(double phi, double db1, double db2, NoisePhase sign) {
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  return sign == NoisePhase::Minus ? (c * db2 + s * db1) * kInvSqrt2
                                   : (c * db2 - s * db1) * kInvSqrt2;
}

/// Im{e^{-i phi} dB}.
inline double im_noise(double phi, double db1, double db2) {
  return (std::cos(phi) * db1 - std::sin(phi) * db2) * kInvSqrt2;
}

struct SDEFamilyPath {
  std::vector<double> lambdas;
  double dt = 0.0;
  double horizon = 0.0;
  std::uint64_t noise_seed = 0;
  std::vector<double> save_times;
  std::vector<std::vector<double>> phase;       ///< [lambda][save]
  std::vector<std::vector<double>> log_radius;  ///< [lambda][save], Model I pair only
};

namespace detail {

inline std::vector<std::size_t> save_steps(const std::vector<double>& times, double dt, std::size_t steps) {
  std::vector<std::size_t> out;
  for (double t : times) {
    if (t < 0.0) throw std::invalid_argument("save time must be >= 0");
    out.push_back(std::min(steps, static_cast<std::size_t>(std::llround(t / dt))));
  }
  return out;
}

inline void require_increasing(const std::vector<double>& lambdas) {
  for (std::size_t i = 1; i < lambdas.size(); ++i)
    if (!(lambdas[i] > lambdas[i - 1])) throw std::invalid_argument("lambda grid must be strictly increasing");
}

inline void check_family_monotone(const SDEFamilyPath& p) {
  for (std::size_t s = 0; s < p.save_times.size(); ++s) {
    if (p.save_times[s] <= 0.0) continue;
    for (std::size_t i = 1; i < p.lambdas.size(); ++i)
      if (!(p.phase[i][s] > p.phase[i - 1][s]))
        throw MonotonicityError("phase not increasing in lambda at t = " + std::to_string(p.save_times[s]) +
                                "; reduce dt");
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Schrodinger family: d phi = mu dt + c_B Re{e^{-i phi} dB} + c_W dW.

struct SchOptions {
  bool zero_noise = false;
  NoisePhase sign = NoisePhase::Minus;
  double noise_scale = 1.0;  ///< multiplies both dB and dW (sigma of the Model I form)
};

/// Integrates one member with drift mu over the first `steps` entries of the tape.
template <class Visit>
double integrate_phase(double mu, const NoiseTape& tape, std::size_t steps, const SchOptions& opt, Visit&& visit) {
  double phi = 0.0;
  const double g = opt.noise_scale;
  for (std::size_t i = 0; i < steps; ++i) {
    phi += mu * tape.dt + g * (re_noise(phi, tape.b1[i], tape.b2[i], opt.sign) + tape.w[i]);
    visit(i + 1, phi);
  }
  return phi;
}

inline double integrate_phase(double mu, const NoiseTape& tape, std::size_t steps, const SchOptions& opt) {
  return integrate_phase(mu, tape, steps, opt, [](std::size_t, double) {});
}

/// Paths of phi^{lambda/tau} on [0, tau] for each lambda, sharing one noise tape.
inline SDEFamilyPath simulate_schrodinger_family(const std::vector<double>& lambdas, double tau, double dt,
                                                 std::uint64_t seed, std::vector<double> save_times = {},
                                                 const SchOptions& opt = {}) {
  if (!(dt > 0.0)) throw std::invalid_argument("simulate_schrodinger_family: dt must be > 0");
  if (!(tau > 0.0)) throw std::invalid_argument("simulate_schrodinger_family: tau must be > 0");
  detail::require_increasing(lambdas);
  if (save_times.empty()) save_times = {tau};
  const std::size_t steps = steps_for(tau, dt);
  NoiseTape tape(seed, steps, dt, opt.zero_noise);
  const auto at = detail::save_steps(save_times, dt, steps);
  SDEFamilyPath p;
  p.lambdas = lambdas;
  p.dt = dt;
  p.horizon = tau;
  p.noise_seed = seed;
  p.save_times = save_times;
  p.phase.assign(lambdas.size(), std::vector<double>(at.size(), 0.0));
  for (std::size_t l = 0; l < lambdas.size(); ++l) {
    auto& row = p.phase[l];
    integrate_phase(lambdas[l] / tau, tape, steps, opt, [&](std::size_t i, double phi) {
      for (std::size_t s = 0; s < at.size(); ++s)
        if (at[s] == i) row[s] = phi;
    });
  }
  detail::check_family_monotone(p);
  return p;
}

/// The point process Sch_tau for one noise realization, with roots refined by
/// re-simulating on the stored tape.
class SchFamily {
 public:
  SchFamily(double tau, double dt, std::uint64_t seed, SchOptions opt = {}, double level_shift = 0.0)
      : tau_(tau), steps_(steps_for(tau, dt)), tape_(seed, steps_, dt, opt.zero_noise), opt_(opt),
        shift_(level_shift) {
    if (!(tau > 0.0)) throw std::invalid_argument("SchFamily: tau must be > 0");
  }

  /// phi^{lambda/tau}(tau).
  [[nodiscard]] double endpoint(double lambda) const { return integrate_phase(lambda / tau_, tape_, steps_, opt_); }

  /// Points {lambda : phi^{lambda/tau}(tau) in shift + 2 pi Z} in [lo, hi].
  [[nodiscard]] PointSet points(double lo, double hi, double grid_step = 0.5, double tol = 1e-9) const {
    if (!(lo < hi)) throw std::invalid_argument("SchFamily::points: empty window");
    const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / grid_step));
    std::vector<double> grid(n + 1);
    std::vector<double> lev(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n);
      lev[i] = level(grid[i]);
      if (i > 0 && !(lev[i] > lev[i - 1]))
        throw MonotonicityError("Sch family not increasing in lambda; reduce dt");
    }
    std::vector<double> roots;
    for (std::size_t i = 0; i < n; ++i) {
      const auto a_lvl = static_cast<long>(std::ceil(lev[i]));
      const auto b_lvl = static_cast<long>(std::floor(lev[i + 1]));
      for (long m = a_lvl; m <= b_lvl; ++m) {
        const double target = static_cast<double>(m);
        if (i > 0 && lev[i] == target) continue;
        const double fa = lev[i] - target;
        const double fb = lev[i + 1] - target;
        if (fa == 0.0) {
          roots.push_back(grid[i]);
          continue;
        }
        if (fb == 0.0) {
          roots.push_back(grid[i + 1]);
          continue;
        }
        auto f = [&](double x) { return level(x) - target; };
        auto stop = [tol](double x, double y) { return std::abs(y - x) <= tol; };
        std::uintmax_t iters = 200;
        auto [x, y] = boost::math::tools::toms748_solve(f, grid[i], grid[i + 1], fa, fb, stop, iters);
        roots.push_back(0.5 * (x + y));
      }
    }
    return PointSet(std::move(roots), Provenance::Sch, tau_, tape_.seed);
  }

 private:
  [[nodiscard]] double level(double lambda) const { return (endpoint(lambda) - shift_) / kTwoPi; }

  double tau_;
  std::size_t steps_;
  NoiseTape tape_;
  SchOptions opt_;
  double shift_;
};

inline PointSet extract_sch_points(double tau, double dt, std::uint64_t seed, double lo, double hi,
                                   const SchOptions& opt = {}, double level_shift = 0.0) {
  return SchFamily(tau, dt, seed, opt, level_shift).points(lo, hi);
}

// ---------------------------------------------------------------------------
// Model I pair: d vartheta = lambda dt + sigma Re{e^{-i vartheta} dB} + sigma dW,
//               d r = sigma^2/8 dt + sigma/2 Im{e^{-i vartheta} dB}.

inline SDEFamilyPath simulate_model1_pair(const std::vector<double>& lambdas, double sigma, double dt,
                                          std::uint64_t seed, double horizon = 1.0,
                                          std::vector<double> save_times = {}, bool zero_noise = false) {
  if (!(sigma > 0.0)) throw std::invalid_argument("simulate_model1_pair: sigma must be > 0");
  detail::require_increasing(lambdas);
  const std::size_t steps = steps_for(horizon, dt);
  NoiseTape tape(seed, steps, dt, zero_noise);
  if (save_times.empty()) save_times = {horizon};
  const auto at = detail::save_steps(save_times, dt, steps);
  SDEFamilyPath p;
  p.lambdas = lambdas;
  p.dt = dt;
  p.horizon = horizon;
  p.noise_seed = seed;
  p.save_times = save_times;
  p.phase.assign(lambdas.size(), std::vector<double>(at.size(), 0.0));
  p.log_radius.assign(lambdas.size(), std::vector<double>(at.size(), 0.0));
  const double drift_r = sigma * sigma / 8.0;
  for (std::size_t l = 0; l < lambdas.size(); ++l) {
    double th = 0.0;
    double r = 0.0;
    for (std::size_t i = 0; i < steps; ++i) {
      const double db1 = tape.b1[i];
      const double db2 = tape.b2[i];
      const double dth = lambdas[l] * dt + sigma * (re_noise(th, db1, db2, NoisePhase::Minus) + tape.w[i]);
      r += drift_r * dt + 0.5 * sigma * im_noise(th, db1, db2);
      th += dth;
      for (std::size_t s = 0; s < at.size(); ++s)
        if (at[s] == i + 1) {
          p.phase[l][s] = th;
          p.log_radius[l][s] = r;
        }
    }
  }
  detail::check_family_monotone(p);
  return p;
}

// ---------------------------------------------------------------------------
// Sine family: d alpha = lambda (beta/4) e^{-beta t/4} dt + Re{(e^{-i alpha} - 1) dZ}.

/// How alpha(T) is mapped to alpha_infinity.
enum class SnapRule {
  /// Nearest multiple of 2 pi.
  Nearest,
  /// Once the drift is spent alpha is a bounded martingale between two lattice
  /// points, so it exits upward with probability equal to the fractional
  /// position. One uniform per family keeps the snapped counts monotone in lambda.
  ExitLaw,
};

/// Horizon at which the remaining drift lambda_max e^{-beta T/4} falls below tail.
inline double sine_horizon(double beta, double lambda_max, double tail = 1e-3) {
  if (!(beta > 0.0)) throw std::invalid_argument("sine_horizon: beta must be > 0");
  return std::max(1.0, (4.0 / beta) * std::log(std::max(lambda_max, 1e-12) * beta / (4.0 * tail)));
}

struct SineOptions {
  SnapRule snap = SnapRule::ExitLaw;
  double residual_limit = kPi / 4.0;
  bool zero_noise = false;
};

struct SineFamily {
  SDEFamilyPath path;
  std::vector<double> alpha_T;      ///< alpha^lambda(T) per lambda
  std::vector<long> alpha_inf;      ///< alpha_infinity / 2 pi per lambda
  std::vector<double> residual;     ///< distance of alpha(T) to the nearest lattice point
  bool floor_monotone = true;       ///< floor(alpha/2pi) never decreased along any path

  /// N[lambda_i, lambda_j] = (alpha_inf(j) - alpha_inf(i)).
  [[nodiscard]] long count(std::size_t i, std::size_t j) const { return alpha_inf.at(j) - alpha_inf.at(i); }

  [[nodiscard]] std::size_t unconverged(double limit = kPi / 4.0) const {
    return static_cast<std::size_t>(
        std::count_if(residual.begin(), residual.end(), [limit](double r) { return r > limit; }));
  }
};

inline SineFamily simulate_sine_family(const std::vector<double>& lambdas, double beta, double T, double dt,
                                       std::uint64_t seed, const SineOptions& opt = {},
                                       std::vector<double> save_times = {}) {
  if (!(beta > 0.0)) throw std::invalid_argument("simulate_sine_family: beta must be > 0");
  if (!(dt > 0.0)) throw std::invalid_argument("simulate_sine_family: dt must be > 0");
  detail::require_increasing(lambdas);
  const std::size_t steps = steps_for(T, dt);
  Rng rng(derive_seed(seed, 0x51));
  const auto at = detail::save_steps(save_times, dt, steps);
  SineFamily out;
  auto& p = out.path;
  p.lambdas = lambdas;
  p.dt = dt;
  p.horizon = T;
  p.noise_seed = seed;
  p.save_times = save_times;
  p.phase.assign(lambdas.size(), std::vector<double>(at.size(), 0.0));
  std::vector<double> a(lambdas.size(), 0.0);
  std::vector<double> fl(lambdas.size(), 0.0);
  const double q = beta / 4.0;
  const double sd = std::sqrt(dt);
  for (std::size_t i = 0; i < steps; ++i) {
    const double z1 = opt.zero_noise ? 0.0 : sd * rng.normal();
    const double z2 = opt.zero_noise ? 0.0 : sd * rng.normal();
    const double drift = q * std::exp(-q * static_cast<double>(i) * dt) * dt;
    for (std::size_t l = 0; l < lambdas.size(); ++l) {
      const double x = a[l];
      a[l] = x + lambdas[l] * drift + ((std::cos(x) - 1.0) * z2 + std::sin(x) * z1) * kInvSqrt2;
      const double f = std::floor(a[l] / kTwoPi);
      if (f < fl[l]) out.floor_monotone = false;
      fl[l] = f;
    }
    for (std::size_t s = 0; s < at.size(); ++s)
      if (at[s] == i + 1)
        for (std::size_t l = 0; l < lambdas.size(); ++l) p.phase[l][s] = a[l];
  }
  const double u = rng.uniform();
  for (double x : a) {
    const double y = x / kTwoPi;
    const double nearest = std::round(y);
    out.alpha_T.push_back(x);
    out.residual.push_back(std::abs(y - nearest) * kTwoPi);
    if (opt.snap == SnapRule::Nearest)
      out.alpha_inf.push_back(static_cast<long>(nearest));
    else
      out.alpha_inf.push_back(static_cast<long>(std::floor(y - u)) + 1);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Pre-time-change Model II form:
// d vartheta = lambda dt + sigma/sqrt(1-t) Re{e^{+-i vartheta} dB} + sigma dW on [0, T'), T' < 1.

inline SDEFamilyPath simulate_sine2_family(const std::vector<double>& lambdas, double sigma, double T_end,
                                           double dt, std::uint64_t seed, std::vector<double> save_times,
                                           NoisePhase sign = NoisePhase::Plus) {
  if (!(T_end > 0.0 && T_end < 1.0)) throw std::invalid_argument("simulate_sine2_family: horizon must lie in (0,1)");
  detail::require_increasing(lambdas);
  const std::size_t steps = steps_for(T_end, dt);
  NoiseTape tape(seed, steps, dt);
  const auto at = detail::save_steps(save_times, dt, steps);
  SDEFamilyPath p;
  p.lambdas = lambdas;
  p.dt = dt;
  p.horizon = T_end;
  p.noise_seed = seed;
  p.save_times = save_times;
  p.phase.assign(lambdas.size(), std::vector<double>(at.size(), 0.0));
  for (std::size_t l = 0; l < lambdas.size(); ++l) {
    double th = 0.0;
    for (std::size_t i = 0; i < steps; ++i) {
      const double t = static_cast<double>(i) * dt;
      const double env = sigma / std::sqrt(1.0 - t);
      th += lambdas[l] * dt + env * re_noise(th, tape.b1[i], tape.b2[i], sign) + sigma * tape.w[i];
      for (std::size_t s = 0; s < at.size(); ++s)
        if (at[s] == i + 1) p.phase[l][s] = th;
    }
  }
  return p;
}

/// s = 1 - e^{-beta t/4} and its inverse.
inline double sine_time_to_unit(double t, double beta) { return 1.0 - std::exp(-beta * t / 4.0); }
inline double unit_to_sine_time(double s, double beta) { return -4.0 / beta * std::log1p(-s); }

/// beta from the main theorem, 2/sigma^2.
inline double sine_beta_nominal(double sigma2) { return 2.0 / sigma2; }
/// beta for which the time change matches under the B = (B2 + i B1)/sqrt(2) normalization.
inline double sine_beta_matched(double sigma2) { return 4.0 / sigma2; }

}  // namespace dirac
