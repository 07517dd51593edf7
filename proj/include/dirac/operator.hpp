#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dirac/disorder.hpp"
#include "dirac/errors.hpp"

namespace dirac {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kInvSqrt2 = 0.70710678118654752440;

/// Representative of x mod 2*pi in [0, 2*pi).
inline double reduce_2pi(double x) {
  double r = std::fmod(x, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

struct ModelConfig {
  PotentialModel model = PotentialModel::ModelI;
  double m = 0.0;
  double E = 1.0;
  double alpha = 0.5;
  double gamma = 1.0;
  std::size_t L = 100;
};

inline double band_top(double m) { return std::sqrt(m * m + 4.0); }

/// Quasi-momentum on (-pi, -pi/2) with cos k = -sqrt(E^2 - m^2)/2.
inline double dispersion_k(double E, double m) {
  if (!(m >= 0.0)) throw std::invalid_argument("dispersion_k: mass must be >= 0");
  if (!(E > m && E < band_top(m)))
    throw EnergyError("energy outside the open positive band (m, sqrt(m^2+4))");
  const double k = -std::acos(-0.5 * std::sqrt(E * E - m * m));
  if (std::abs(k + 0.75 * kPi) < 1e-9) throw EnergyError("excluded energy E = sqrt(m^2+2)");
  return k;
}

/// rho(E) = 4|E| / sqrt((E^2-m^2)(m^2+4-E^2)); (2 pi)^-1 rho is the density of states.
inline double rho_density(double E, double m) {
  const double a = std::abs(E);
  if (!(a > m && a < band_top(m))) throw EnergyError("rho_density: energy outside the bands");
  return 4.0 * a / std::sqrt((a * a - m * m) * (m * m + 4.0 - a * a));
}

struct EnergyFrame {
  double m = 0.0;
  double E = 0.0;
  std::size_t L = 0;
  double k = 0.0;
  double rho = 0.0;
  double p1 = 0.0;  ///< m - E
  double p2 = 0.0;  ///< m + E
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  double sigma2_total = 0.0;  ///< sigma1^2 + sigma2^2
  double eta_L = 0.0;         ///< (2L-1)k reduced to [0, 2 pi)
  double eta_L_raw = 0.0;
};

inline EnergyFrame energy_frame(double E, double m, std::size_t L) {
  if (L < 1) throw std::invalid_argument("energy_frame: L must be >= 1");
  EnergyFrame f;
  f.m = m;
  f.E = E;
  f.L = L;
  f.k = dispersion_k(E, m);
  f.rho = rho_density(E, m);
  f.p1 = m - E;
  f.p2 = m + E;
  const double s2k = std::sin(2.0 * f.k);
  f.sigma1 = -f.p1 / s2k;
  f.sigma2 = f.p2 / s2k;
  f.sigma2_total = f.sigma1 * f.sigma1 + f.sigma2 * f.sigma2;
  f.eta_L_raw = (2.0 * static_cast<double>(L) - 1.0) * f.k;
  f.eta_L = reduce_2pi(f.eta_L_raw);
  return f;
}

inline EnergyFrame energy_frame(const ModelConfig& c) { return energy_frame(c.E, c.m, c.L); }

/// Effective noise strength including the coupling: gamma^2 * sigma^2.
inline double effective_sigma2(const EnergyFrame& f, double gamma) { return gamma * gamma * f.sigma2_total; }

/// Symmetric tridiagonal restriction to the box, ordered
/// (phi^-_1, phi^+_1, phi^-_2, ..., phi^-_L).
struct BoxMatrix {
  std::vector<double> diag;
  std::vector<double> offdiag;

  [[nodiscard]] std::size_t dim() const { return diag.size(); }
};

inline BoxMatrix build_matrix(double m, const PotentialSequence& pot) {
  const std::size_t L = pot.L;
  if (L < 1 || pot.v1.size() != L || pot.v2.size() != L)
    throw std::invalid_argument("build_matrix: potential length does not match L");
  BoxMatrix b;
  b.diag.reserve(2 * L - 1);
  b.offdiag.reserve(2 * L - 2);
  for (std::size_t n = 1; n <= L; ++n) {
    b.diag.push_back(-m + pot.V2(n));
    if (n < L) {
      b.diag.push_back(m + pot.V1(n));
      b.offdiag.push_back(1.0);
      b.offdiag.push_back(-1.0);
    }
  }
  return b;
}

inline BoxMatrix build_matrix(const ModelConfig& c, const PotentialSequence& pot) {
  if (pot.L != c.L) throw std::invalid_argument("build_matrix: potential length does not match L");
  return build_matrix(c.m, pot);
}

inline void write_matrix_csv(std::ostream& os, const BoxMatrix& b) {
  os.precision(17);
  os << "i,diag,offdiag\n";
  for (std::size_t i = 0; i < b.dim(); ++i) {
    os << i << ',' << b.diag[i] << ',';
    if (i < b.offdiag.size()) os << b.offdiag[i];
    os << '\n';
  }
}

/// Row-major 2x2 real matrix.
struct Mat2 {
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

  [[nodiscard]] double det() const { return a * d - b * c; }
  [[nodiscard]] std::array<double, 2> apply(std::array<double, 2> v) const {
    return {a * v[0] + b * v[1], c * v[0] + d * v[1]};
  }
  [[nodiscard]] Mat2 inverse() const {
    const double D = det();
    return {d / D, -b / D, -c / D, a / D};
  }
  friend Mat2 operator*(const Mat2& x, const Mat2& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
  }
};

using TransferMatrix = Mat2;

/// T(x1, x2) = [[p1 p2 + 1, p2], [p1, 1]], p1 = m - E + x1, p2 = m + E - x2.
inline TransferMatrix transfer_matrix(double x1, double x2, double E, double m) {
  const double p1 = m - E + x1;
  const double p2 = m + E - x2;
  return {p1 * p2 + 1.0, p2, p1, 1.0};
}

/// Shifted potentials of step j = 0..L-1: x1 = V1(j) - s, x2 = V2(j+1) - s with
/// s = lambda/(rho L) and V1(0) = 0. Step j maps (phi^+_j, phi^-_j) to
/// (phi^+_{j+1}, phi^-_{j+1}).
inline std::pair<double, double> step_potentials(const PotentialSequence& pot, std::size_t j, double shift) {
  const double v1 = j == 0 ? 0.0 : pot.v1[j - 1];
  return {v1 - shift, pot.v2[j] - shift};
}

/// Propagates (phi^+_0, phi^-_0) = (0, 1) through L steps at energy
/// E + lambda/(rho L). The box eigenvalue condition is phi^+_L = 0.
/// The state is renormalized along the way; only its direction is returned.
inline std::array<double, 2> propagate_state(const EnergyFrame& f, const PotentialSequence& pot, double lambda) {
  const double shift = lambda / (f.rho * static_cast<double>(f.L));
  std::array<double, 2> s{0.0, 1.0};
  for (std::size_t j = 0; j < pot.L; ++j) {
    auto [x1, x2] = step_potentials(pot, j, shift);
    s = transfer_matrix(x1, x2, f.E, f.m).apply(s);
    const double nrm = std::hypot(s[0], s[1]);
    s[0] /= nrm;
    s[1] /= nrm;
  }
  return s;
}

}  // namespace dirac
