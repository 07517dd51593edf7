#pragma once

#include <boost/math/tools/toms748_solve.hpp>

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dirac/disorder.hpp"
#include "dirac/errors.hpp"
#include "dirac/operator.hpp"
#include "dirac/point_set.hpp"

namespace dirac {

/// How the per-step phase increment is taken.
enum class BranchPolicy {
  /// Principal Im log(1 + Gamma); throws ContractionError once |Gamma| >= 1/2.
  StrictContraction,
  /// Continuous lift along the coupling homotopy; valid for any box size.
  ExactLift,
};

using BasisMatrix = Mat2;

/// P_n = (-1)^(n-1) [[-sqrt(p2) cos((2n-1)k), -sqrt(p2) sin((2n-1)k)],
///                   [sqrt(-p1) cos((2n-2)k),  sqrt(-p1) sin((2n-2)k)]].
inline BasisMatrix basis_matrix(long n, const EnergyFrame& f) {
  if (!(f.p1 < 0.0 && f.p2 > 0.0)) throw EnergyError("basis_matrix: frame out of band");
  const double sign = ((n - 1) % 2 == 0) ? 1.0 : -1.0;
  const double a = std::sqrt(f.p2);
  const double b = std::sqrt(-f.p1);
  const double x = static_cast<double>(2 * n - 1) * f.k;
  const double y = static_cast<double>(2 * n - 2) * f.k;
  return {-sign * a * std::cos(x), -sign * a * std::sin(x), sign * b * std::cos(y), sign * b * std::sin(y)};
}

/// arg of zeta(0) = P_0^{-1} (phi^+_0, phi^-_0) with (phi^+_0, phi^-_0) = (0, 1).
inline double initial_phase(const EnergyFrame& f) {
  const auto z = basis_matrix(0, f).inverse().apply({0.0, 1.0});
  return std::atan2(z[1], z[0]);
}

/// Offset of the eigenvalue lattice: lambda is a box eigenvalue iff
/// boundary_phase(lambda) - level_offset in 2 pi Z.
inline double level_offset(const EnergyFrame& f) { return 2.0 * f.eta_L + kPi; }

/// Shift that maps rescaled eigenvalues onto the lattice 2 pi Z in the free
/// limit: level_offset minus the initial doubled phase, reduced to [0, 2 pi).
inline double rescaled_offset(const EnergyFrame& f) {
  return reduce_2pi(level_offset(f) - 2.0 * initial_phase(f));
}

struct PrueferStep {
  double dtheta = 0.0;
  double dr = 0.0;
  double gamma_abs = 0.0;
};

/// Constants of the Gamma_j recursion at a fixed base energy.
class PrueferKernel {
 public:
  explicit PrueferKernel(const EnergyFrame& f, BranchPolicy policy = BranchPolicy::ExactLift)
      : s1_(f.sigma1), s2_(f.sigma2), s12_(std::sqrt(f.sigma1 * f.sigma2)), ck_(std::cos(f.k)),
        sk_(std::sin(f.k)), policy_(policy) {}

  /// Gamma_j split as (linear part, cross term) at reduced angle tb = theta - eta_j.
  [[nodiscard]] std::pair<std::complex<double>, std::complex<double>> gamma_parts(double tb, double v1,
                                                                                  double v2) const {
    const double c = std::cos(tb);
    const double s = std::sin(tb);
    const double cm = c * ck_ + s * sk_;  // cos(tb - k)
    const double sm = s * ck_ - c * sk_;  // sin(tb - k)
    const std::complex<double> mi(0.0, -1.0);
    const std::complex<double> e0(c, -s);
    const std::complex<double> e1(cm, -sm);
    const std::complex<double> lin = mi * (s2_ * c * e0 * v1 + s1_ * cm * e1 * v2);
    const std::complex<double> cross = mi * (s12_ * c * v1 * v2) * e1;
    return {lin, cross};
  }

  [[nodiscard]] std::complex<double> gamma(double tb, double v1, double v2) const {
    auto [a, c] = gamma_parts(tb, v1, v2);
    return a + c;
  }

  [[nodiscard]] PrueferStep step(double tb, double v1, double v2) const {
    auto [a, c] = gamma_parts(tb, v1, v2);
    const std::complex<double> g = a + c;
    const std::complex<double> one_plus = 1.0 + g;
    PrueferStep out;
    out.gamma_abs = std::abs(g);
    out.dr = std::log(std::abs(one_plus));
    if (policy_ == BranchPolicy::StrictContraction) {
      if (!(out.gamma_abs < 0.5))
        throw ContractionError("recursion out of contraction regime (|Gamma| = " + std::to_string(out.gamma_abs) +
                               "); increase L");
      out.dtheta = std::arg(one_plus);
      return out;
    }
    if (std::abs(a) + std::abs(c) < 1.0 || c == 0.0) {
      out.dtheta = std::arg(one_plus);
      return out;
    }
    // 1 + a s + c s^2 = (1 - w1 s)(1 - w2 s): the phase picked up along s in [0, 1]
    // is the sum of the principal arguments of the two linear factors.
    const std::complex<double> disc = std::sqrt(a * a - 4.0 * c);
    const std::complex<double> w1 = 0.5 * (-a + disc);
    const std::complex<double> w2 = 0.5 * (-a - disc);
    out.dtheta = std::arg(1.0 - w1) + std::arg(1.0 - w2);
    return out;
  }

  [[nodiscard]] BranchPolicy policy() const { return policy_; }

 private:
  double s1_, s2_, s12_, ck_, sk_;
  BranchPolicy policy_;
};

struct PrueferTrajectory {
  double lambda = 0.0;
  double initial_phase = 0.0;     ///< theta of zeta(0); theta below is relative to it
  std::vector<double> theta;      ///< theta(j), j = 0..L, theta(0) = 0
  std::vector<double> r;          ///< log-radius, r(0) = 0
  std::vector<double> eta;        ///< eta_j = (2j-1)k
  double theta_bar_final = 0.0;   ///< theta_abs(L) - (2L-1)k reduced to [0, 2 pi)
  double max_gamma = 0.0;

  [[nodiscard]] double boundary_phase() const { return 2.0 * (initial_phase + theta.back()); }
};

struct PhaseEndpoint {
  double theta_abs = 0.0;  ///< theta_init + accumulated increments
  double r = 0.0;
  double theta_bar = 0.0;  ///< theta_abs - (2L-1)k reduced to [0, 2 pi)
  double max_gamma = 0.0;
};

/// Boundary phase evaluator for one realization at a fixed base energy.
class PhaseSolver {
 public:
  PhaseSolver(const EnergyFrame& f, const PotentialSequence& pot, BranchPolicy policy = BranchPolicy::ExactLift)
      : frame_(f), pot_(pot), kernel_(f, policy), theta0_(initial_phase(f)) {
    if (pot.L != f.L) throw std::invalid_argument("PhaseSolver: potential length does not match frame L");
  }

  [[nodiscard]] const EnergyFrame& frame() const { return frame_; }
  [[nodiscard]] double theta_init() const { return theta0_; }

  template <class Visit>
  PhaseEndpoint run(double lambda, Visit&& visit) const {
    const double shift = lambda / (frame_.rho * static_cast<double>(frame_.L));
    const double two_k = 2.0 * frame_.k;
    PhaseEndpoint e;
    e.theta_abs = theta0_;
    double tb = reduce_2pi(theta0_ + frame_.k);  // eta_0 = -k
    for (std::size_t j = 0; j < frame_.L; ++j) {
      auto [v1, v2] = step_potentials(pot_, j, shift);
      const PrueferStep s = kernel_.step(tb, v1, v2);
      e.theta_abs += s.dtheta;
      e.r += s.dr;
      if (s.gamma_abs > e.max_gamma) e.max_gamma = s.gamma_abs;
      tb = reduce_2pi(tb + s.dtheta - two_k);
      visit(j + 1, e);
    }
    e.theta_bar = tb;
    return e;
  }

  [[nodiscard]] PhaseEndpoint run(double lambda) const {
    return run(lambda, [](std::size_t, const PhaseEndpoint&) {});
  }

  /// Doubled boundary phase vartheta(L) = 2 theta(L).
  [[nodiscard]] double boundary_phase(double lambda) const { return 2.0 * run(lambda).theta_abs; }

  /// (vartheta(L) - level_offset) / 2 pi; integer exactly at box eigenvalues.
  [[nodiscard]] double level(double lambda) const {
    return (boundary_phase(lambda) - level_offset(frame_)) / kTwoPi;
  }

  [[nodiscard]] PrueferTrajectory trajectory(double lambda) const {
    PrueferTrajectory t;
    t.lambda = lambda;
    t.initial_phase = theta0_;
    const std::size_t L = frame_.L;
    t.theta.reserve(L + 1);
    t.r.reserve(L + 1);
    t.eta.reserve(L + 1);
    t.theta.push_back(0.0);
    t.r.push_back(0.0);
    t.eta.push_back(-frame_.k);
    const double th0 = theta0_;
    const double k = frame_.k;
    auto e = run(lambda, [&](std::size_t j, const PhaseEndpoint& p) {
      t.theta.push_back(p.theta_abs - th0);
      t.r.push_back(p.r);
      t.eta.push_back((2.0 * static_cast<double>(j) - 1.0) * k);
    });
    t.theta_bar_final = e.theta_bar;
    t.max_gamma = e.max_gamma;
    return t;
  }

  /// G_L(lambda) = <delta^-_L, (D - E - lambda/(rho L))^{-1} delta^-_L>.
  [[nodiscard]] double boundary_green(double lambda) const {
    const double tb = run(lambda).theta_bar;
    const double c = std::cos(tb);
    if (std::abs(c) < 1e-14) throw std::domain_error("boundary_green: pole (lambda is an eigenvalue)");
    return std::sqrt(-frame_.p1) / std::sqrt(frame_.p2) * (std::cos(frame_.k) - std::sin(frame_.k) * std::tan(tb));
  }

  /// All lambda in [lo, hi] at which the boundary phase hits the eigenvalue lattice.
  [[nodiscard]] PointSet solve_spectrum(double lo, double hi, double rel_tol = 1e-10,
                                        std::size_t check_grid = 8) const {
    if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi))
      throw std::invalid_argument("solve_spectrum: window must be finite with lo < hi");
    std::vector<double> grid(check_grid + 1);
    std::vector<double> lev(check_grid + 1);
    for (std::size_t i = 0; i <= check_grid; ++i) {
      grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(check_grid);
      lev[i] = level(grid[i]);
      if (i > 0 && !(lev[i] > lev[i - 1]))
        throw MonotonicityError("boundary phase not increasing on the lambda grid");
    }
    const double tol = rel_tol * (hi - lo);
    std::vector<double> roots;
    for (std::size_t i = 0; i < check_grid; ++i) {
      const double a = grid[i];
      const double b = grid[i + 1];
      const auto n_lo = static_cast<long>(std::ceil(lev[i]));
      const auto n_hi = static_cast<long>(std::floor(lev[i + 1]));
      for (long n = n_lo; n <= n_hi; ++n) {
        const double target = static_cast<double>(n);
        // Levels sitting exactly on a shared grid node are counted once.
        if (i > 0 && lev[i] == target) continue;
        roots.push_back(find_level(a, b, lev[i] - target, lev[i + 1] - target, target, tol));
      }
    }
    return PointSet(std::move(roots), Provenance::RescaledSpectrum, 0.0, 0);
  }

 private:
  double find_level(double a, double b, double fa, double fb, double target, double tol) const {
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    auto f = [&](double x) { return level(x) - target; };
    auto stop = [tol](double x, double y) { return std::abs(y - x) <= tol; };
    std::uintmax_t iters = 200;
    auto [x, y] = boost::math::tools::toms748_solve(f, a, b, fa, fb, stop, iters);
    return 0.5 * (x + y);
  }

  EnergyFrame frame_;
  PotentialSequence pot_;
  PrueferKernel kernel_;
  double theta0_;
};

// Free-function forms.

inline PotentialSequence potentials_for(const ModelConfig& c, const DisorderRealization& env) {
  return potential_sequence(c.model, env, c.L, c.alpha, c.gamma);
}

inline PrueferTrajectory pruefer_trajectory(double lambda, const EnergyFrame& f, const PotentialSequence& pot,
                                            BranchPolicy policy = BranchPolicy::StrictContraction) {
  return PhaseSolver(f, pot, policy).trajectory(lambda);
}

inline double boundary_phase(double lambda, const EnergyFrame& f, const PotentialSequence& pot,
                             BranchPolicy policy = BranchPolicy::ExactLift) {
  return PhaseSolver(f, pot, policy).boundary_phase(lambda);
}

inline double boundary_green(double lambda, const EnergyFrame& f, const PotentialSequence& pot,
                             BranchPolicy policy = BranchPolicy::ExactLift) {
  return PhaseSolver(f, pot, policy).boundary_green(lambda);
}

inline PointSet solve_spectrum_by_phase(const EnergyFrame& f, const PotentialSequence& pot, double lo, double hi,
                                        BranchPolicy policy = BranchPolicy::ExactLift) {
  return PhaseSolver(f, pot, policy).solve_spectrum(lo, hi);
}

inline void write_trajectory_csv(std::ostream& os, const PrueferTrajectory& t) {
  os.precision(17);
  os << "# lambda=" << t.lambda << " initial_phase=" << t.initial_phase << "\n";
  os << "j,theta,r\n";
  for (std::size_t j = 0; j < t.theta.size(); ++j) os << j << ',' << t.theta[j] << ',' << t.r[j] << '\n';
}

}  // namespace dirac
