#pragma once

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "dirac/limits.hpp"
#include "dirac/operator.hpp"
#include "dirac/point_set.hpp"
#include "dirac/pruefer.hpp"
#include "dirac/rng.hpp"

namespace dirac {

// ---------------------------------------------------------------------------
// Elementary summaries.

struct Moments {
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;       ///< unbiased
  double stderr_mean = 0.0;
  double stderr_variance = 0.0;
};

inline Moments moments(const std::vector<double>& x) {
  Moments m;
  m.n = x.size();
  if (m.n == 0) return m;
  m.mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(m.n);
  if (m.n < 2) return m;
  double s2 = 0.0;
  double s4 = 0.0;
  for (double v : x) {
    const double d = (v - m.mean) * (v - m.mean);
    s2 += d;
    s4 += d * d;
  }
  const auto n = static_cast<double>(m.n);
  m.variance = s2 / (n - 1.0);
  m.stderr_mean = std::sqrt(m.variance / n);
  const double mu4 = s4 / n;
  const double mu2 = s2 / n;
  m.stderr_variance = std::sqrt(std::max(0.0, (mu4 - mu2 * mu2) / n));
  return m;
}

// ---------------------------------------------------------------------------
// Integrated density of states.

/// Closed-form N_0(E) of the free operator, normalized to total mass 2
/// (one per band) and equal to 1 in the gap.
inline double ids_closed_form(double E, double m) {
  const double top = band_top(m);
  const double a = std::abs(E);
  double band = 0.0;  // mass of the positive band below |E|
  if (a <= m) {
    band = 0.0;
  } else if (a >= top) {
    band = 1.0;
  } else {
    const double arg = std::clamp((a * a - m * m - 2.0) / 2.0, -1.0, 1.0);
    band = (std::asin(arg) + kPi / 2.0) / kPi;
  }
  return E >= 0.0 ? 1.0 + band : 1.0 - band;
}

struct EmpiricalIDS {
  std::vector<double> eigs;
  std::size_t L = 0;
  std::vector<double> grid;
  std::vector<double> values;
};

/// N(E) = #{eigs <= E}/L on the grid.
inline EmpiricalIDS empirical_ids(std::vector<double> eigs, std::size_t L, const std::vector<double>& grid) {
  if (L < 1) throw std::invalid_argument("empirical_ids: L must be >= 1");
  if (!std::is_sorted(eigs.begin(), eigs.end())) throw std::invalid_argument("empirical_ids: eigenvalues must be sorted");
  EmpiricalIDS out;
  out.L = L;
  out.grid = grid;
  out.values.reserve(grid.size());
  for (double E : grid) {
    const auto c = std::upper_bound(eigs.begin(), eigs.end(), E) - eigs.begin();
    out.values.push_back(static_cast<double>(c) / static_cast<double>(L));
  }
  out.eigs = std::move(eigs);
  return out;
}

/// Uniform grid covering both bands with a margin.
inline std::vector<double> ids_grid(double m, std::size_t n = 2001, double margin = 0.1) {
  const double top = band_top(m) + margin;
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = -top + 2.0 * top * static_cast<double>(i) / static_cast<double>(n - 1);
  return g;
}

inline double ids_sup_error(const EmpiricalIDS& ids, double m) {
  double err = 0.0;
  for (std::size_t i = 0; i < ids.grid.size(); ++i)
    err = std::max(err, std::abs(ids.values[i] - ids_closed_form(ids.grid[i], m)));
  return err;
}

// ---------------------------------------------------------------------------
// Point processes.

/// {rho L (e - E) - rescaled_offset} intersected with [lo, hi].
inline PointSet rescale_spectrum(const std::vector<double>& eigs, const EnergyFrame& f, double lo, double hi,
                                 std::uint64_t seed = 0) {
  const double scale = f.rho * static_cast<double>(f.L);
  const double off = rescaled_offset(f);
  std::vector<double> pts;
  for (double e : eigs) {
    const double x = scale * (e - f.E) - off;
    if (x >= lo && x <= hi) pts.push_back(x);
  }
  return PointSet(std::move(pts), Provenance::RescaledSpectrum, f.E, seed);
}

/// Energy interval that contains every eigenvalue mapped into [lo, hi] by rescale_spectrum.
inline std::pair<double, double> energy_window(const EnergyFrame& f, double lo, double hi) {
  const double scale = f.rho * static_cast<double>(f.L);
  const double off = rescaled_offset(f);
  return {f.E + (lo + off) / scale - 1e-12, f.E + (hi + off) / scale + 1e-12};
}

struct GapSummary {
  std::vector<double> gaps;
  double mean = 0.0;
  double variance = 0.0;

  /// Empirical CDF of the gaps at x.
  [[nodiscard]] double cdf(double x) const {
    std::vector<double> s = gaps;
    std::sort(s.begin(), s.end());
    return static_cast<double>(std::upper_bound(s.begin(), s.end(), x) - s.begin()) /
           static_cast<double>(s.size());
  }
};

inline GapSummary gap_statistics(const PointSet& ps) {
  if (ps.size() < 2) throw std::invalid_argument("gap_statistics: need at least 2 points");
  GapSummary g;
  for (std::size_t i = 1; i < ps.size(); ++i) g.gaps.push_back(ps.points[i] - ps.points[i - 1]);
  const Moments m = moments(g.gaps);
  g.mean = m.mean;
  g.variance = g.gaps.size() > 1 ? m.variance : 0.0;
  return g;
}

struct Estimate {
  double value = 0.0;
  double se = 0.0;
  std::size_t n = 0;
};

/// Monte Carlo estimate of E[exp(-sum_x f(x))] over an ensemble.
inline Estimate laplace_functional(const std::vector<PointSet>& ensemble, const std::function<double(double)>& f) {
  if (ensemble.empty()) throw std::invalid_argument("laplace_functional: empty ensemble");
  std::vector<double> vals;
  vals.reserve(ensemble.size());
  for (const auto& ps : ensemble) {
    double s = 0.0;
    for (double x : ps.points) {
      const double fx = f(x);
      if (fx < 0.0) throw std::invalid_argument("laplace_functional: f must be nonnegative");
      s += fx;
    }
    vals.push_back(std::exp(-s));
  }
  const Moments m = moments(vals);
  return {m.mean, m.stderr_mean, m.n};
}

// ---------------------------------------------------------------------------
// Two-sample tests.

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t df = 0;
};

/// Survival function of the Kolmogorov distribution, P(K > x).
inline double kolmogorov_sf(double x) {
  if (x <= 0.0) return 1.0;
  if (x < 0.2) return 1.0;
  double s = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * x * x);
    s += (j % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-18) break;
  }
  return std::clamp(s, 0.0, 1.0);
}

/// Two-sample Kolmogorov-Smirnov statistic and asymptotic p-value.
inline TestResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty input");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const auto na = static_cast<double>(a.size());
  const auto nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  TestResult r;
  r.statistic = d;
  const double ne = na * nb / (na + nb);
  r.p_value = d == 0.0 ? 1.0 : kolmogorov_sf(std::sqrt(ne) * d);
  return r;
}

/// Two-sample chi-square homogeneity test on integer-valued samples (counts).
/// Categories are pooled from the tails inward until every expected cell is >= min_expected.
inline TestResult chi2_two_sample(const std::vector<long>& a, const std::vector<long>& b, double min_expected = 5.0) {
  if (a.empty() || b.empty()) throw std::invalid_argument("chi2_two_sample: empty input");
  const long lo = std::min(*std::min_element(a.begin(), a.end()), *std::min_element(b.begin(), b.end()));
  const long hi = std::max(*std::max_element(a.begin(), a.end()), *std::max_element(b.begin(), b.end()));
  const auto K = static_cast<std::size_t>(hi - lo + 1);
  std::vector<double> ca(K, 0.0), cb(K, 0.0);
  for (long v : a) ca[static_cast<std::size_t>(v - lo)] += 1.0;
  for (long v : b) cb[static_cast<std::size_t>(v - lo)] += 1.0;
  const auto na = static_cast<double>(a.size());
  const auto nb = static_cast<double>(b.size());
  const double fa = na / (na + nb);
  const double fb = nb / (na + nb);
  auto small = [&](double x, double y) { return (x + y) * std::min(fa, fb) < min_expected; };
  // Pool categories left to right, then fold an undersized remainder into the last cell.
  std::vector<double> pa, pb;
  double xa = 0.0, xb = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    xa += ca[k];
    xb += cb[k];
    if (!small(xa, xb)) {
      pa.push_back(xa);
      pb.push_back(xb);
      xa = xb = 0.0;
    }
  }
  if (xa + xb > 0.0) {
    if (pa.empty()) {
      pa.push_back(xa);
      pb.push_back(xb);
    } else {
      pa.back() += xa;
      pb.back() += xb;
    }
  }
  TestResult r;
  if (pa.size() < 2) return r;
  double chi2 = 0.0;
  for (std::size_t k = 0; k < pa.size(); ++k) {
    const double tot = pa[k] + pb[k];
    const double ea = tot * fa;
    const double eb = tot * fb;
    chi2 += (pa[k] - ea) * (pa[k] - ea) / ea + (pb[k] - eb) * (pb[k] - eb) / eb;
  }
  r.statistic = chi2;
  r.df = pa.size() - 1;
  boost::math::chi_squared dist(static_cast<double>(r.df));
  r.p_value = boost::math::cdf(boost::math::complement(dist, chi2));
  return r;
}

/// Chi-square goodness of fit of samples in [0, 1) to the uniform law on `bins` cells.
inline TestResult chi2_uniform(const std::vector<double>& u, std::size_t bins = 10) {
  if (u.empty() || bins < 2) throw std::invalid_argument("chi2_uniform: need samples and >= 2 bins");
  std::vector<double> c(bins, 0.0);
  for (double x : u) {
    auto k = static_cast<std::size_t>(std::floor(std::clamp(x, 0.0, 1.0) * static_cast<double>(bins)));
    c[std::min(k, bins - 1)] += 1.0;
  }
  const double e = static_cast<double>(u.size()) / static_cast<double>(bins);
  double chi2 = 0.0;
  for (double x : c) chi2 += (x - e) * (x - e) / e;
  TestResult r;
  r.statistic = chi2;
  r.df = bins - 1;
  boost::math::chi_squared dist(static_cast<double>(r.df));
  r.p_value = boost::math::cdf(boost::math::complement(dist, chi2));
  return r;
}

// ---------------------------------------------------------------------------
// Prufer radius law.

struct RadiusLawReport {
  double t = 1.0;
  double target_mean = 0.0;
  double target_variance = 0.0;
  Moments sample;
  double z_mean = 0.0;
  double z_variance = 0.0;
};

/// r(floor(L t)) over replicas r = 0..replicas-1 with seeds derive_seed(seed, r).
/// Targets: mean = variance = gamma^2 sigma^2 t / 8.
inline RadiusLawReport radius_law_check(const ModelConfig& c, double t, std::size_t replicas, std::uint64_t seed,
                                        Distribution dist = Distribution::Rademacher, double lambda = 0.0) {
  if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("radius_law_check: t must lie in [0,1]");
  if (replicas < 2) throw std::invalid_argument("radius_law_check: need >= 2 replicas");
  const EnergyFrame f = energy_frame(c);
  const auto stop = static_cast<std::size_t>(std::floor(static_cast<double>(c.L) * t));
  std::vector<double> r(replicas, 0.0);
  for (std::size_t i = 0; i < replicas; ++i) {
    const auto env = sample_env(dist, derive_seed(seed, i), c.L);
    const auto pot = potentials_for(c, env);
    PhaseSolver solver(f, pot, BranchPolicy::ExactLift);
    double rv = 0.0;
    solver.run(lambda, [&](std::size_t j, const PhaseEndpoint& e) {
      if (j == stop) rv = e.r;
    });
    r[i] = rv;
  }
  RadiusLawReport rep;
  rep.t = t;
  rep.target_mean = effective_sigma2(f, c.gamma) * t / 8.0;
  rep.target_variance = rep.target_mean;
  rep.sample = moments(r);
  auto z = [](double est, double target, double se) {
    if (se > 0.0) return (est - target) / se;
    return est == target ? 0.0 : std::numeric_limits<double>::infinity();
  };
  rep.z_mean = z(rep.sample.mean, rep.target_mean, rep.sample.stderr_mean);
  rep.z_variance = z(rep.sample.variance, rep.target_variance, rep.sample.stderr_variance);
  return rep;
}

// ---------------------------------------------------------------------------
// Eigenfunction profiles.

struct EigenfunctionProfile {
  std::vector<double> w;  ///< sums to 1
  double lambda = 0.0;
  std::size_t center = 0;
};

/// Centered moving average with window max(1, round(frac n)), truncated at the edges.
inline std::vector<double> moving_average(const std::vector<double>& w, double frac = 0.05) {
  const std::size_t n = w.size();
  const auto win = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(frac * static_cast<double>(n))));
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + w[i];
  std::vector<double> out(n);
  const std::size_t left = win / 2;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t a = i >= left ? i - left : 0;
    const std::size_t b = std::min(n, a + win);
    out[i] = (prefix[b] - prefix[a]) / static_cast<double>(win);
  }
  return out;
}

inline std::size_t profile_center(const std::vector<double>& w, double frac = 0.05) {
  const auto ma = moving_average(w, frac);
  return static_cast<std::size_t>(std::max_element(ma.begin(), ma.end()) - ma.begin());
}

inline EigenfunctionProfile make_profile(std::vector<double> w, double lambda) {
  const double s = std::accumulate(w.begin(), w.end(), 0.0);
  if (!(s > 0.0)) throw std::invalid_argument("eigenfunction_profile: zero vector");
  for (double& x : w) x /= s;
  EigenfunctionProfile p;
  p.center = profile_center(w);
  p.w = std::move(w);
  p.lambda = lambda;
  return p;
}

/// Site weights |psi^-(n)|^2 + |psi^+(n)|^2, n = 1..L, from a box eigenvector.
inline EigenfunctionProfile eigenfunction_profile(const std::vector<double>& v, std::size_t L, double lambda = 0.0) {
  if (v.size() != 2 * L - 1) throw std::invalid_argument("eigenfunction_profile: vector length must be 2L-1");
  std::vector<double> w(L, 0.0);
  for (std::size_t i = 0; i < v.size(); ++i) w[i / 2] += v[i] * v[i];
  return make_profile(std::move(w), lambda);
}

/// w proportional to e^{2 r} from a log-radius trajectory.
inline EigenfunctionProfile eigenfunction_profile_from_radius(const std::vector<double>& r, double lambda = 0.0) {
  if (r.empty()) throw std::invalid_argument("eigenfunction_profile: empty trajectory");
  const double top = *std::max_element(r.begin(), r.end());
  std::vector<double> w(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) w[i] = std::exp(2.0 * (r[i] - top));
  return make_profile(std::move(w), lambda);
}

/// log ma(c +- d) - log ma(c), averaged over the sides that stay inside the box;
/// d is in units of the box length. NaN where neither side fits.
inline std::vector<double> profile_log_offsets(const EigenfunctionProfile& p, const std::vector<double>& dists) {
  const auto ma = moving_average(p.w);
  const auto n = static_cast<double>(ma.size());
  const double base = std::log(ma[p.center]);
  std::vector<double> out;
  for (double d : dists) {
    double s = 0.0;
    int cnt = 0;
    for (double sg : {1.0, -1.0}) {
      const double idx = std::floor(static_cast<double>(p.center) + sg * d * n);
      if (idx >= 0.0 && idx < n) {
        s += std::log(std::max(ma[static_cast<std::size_t>(idx)], std::numeric_limits<double>::min())) - base;
        ++cnt;
      }
    }
    out.push_back(cnt > 0 ? s / cnt : std::numeric_limits<double>::quiet_NaN());
  }
  return out;
}

/// Accumulates offsets over profiles and fits E[offset] = a + b * scale * d.
class ProfileSlope {
 public:
  explicit ProfileSlope(std::vector<double> dists) : d_(std::move(dists)), sum_(d_.size(), 0.0), cnt_(d_.size(), 0) {}

  void add(const EigenfunctionProfile& p) {
    const auto off = profile_log_offsets(p, d_);
    for (std::size_t i = 0; i < d_.size(); ++i)
      if (!std::isnan(off[i])) {
        sum_[i] += off[i];
        ++cnt_[i];
      }
  }

  [[nodiscard]] std::vector<double> mean_offsets() const {
    std::vector<double> m(d_.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 0; i < d_.size(); ++i)
      if (cnt_[i] > 0) m[i] = sum_[i] / static_cast<double>(cnt_[i]);
    return m;
  }

  /// Least-squares slope of the mean offset against scale * d over d in [dmin, dmax].
  [[nodiscard]] double slope(double scale, double dmin = 0.05, double dmax = 0.4) const {
    const auto m = mean_offsets();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    double n = 0;
    for (std::size_t i = 0; i < d_.size(); ++i) {
      if (d_[i] < dmin - 1e-12 || d_[i] > dmax + 1e-12 || std::isnan(m[i])) continue;
      const double x = scale * d_[i];
      sx += x;
      sy += m[i];
      sxx += x * x;
      sxy += x * m[i];
      n += 1;
    }
    if (n < 2) throw std::runtime_error("ProfileSlope: not enough distances");
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }

 private:
  std::vector<double> d_;
  std::vector<double> sum_;
  std::vector<std::size_t> cnt_;
};

inline std::vector<double> default_profile_distances() {
  std::vector<double> d;
  for (int i = 0; i <= 40; ++i) d.push_back(0.01 * i);
  return d;
}

/// Discretized S(scale (t - U)) on n cells of [0, 1], with S(t) = exp(B_t/sqrt 2 - |t|/4)
/// and B a two-sided Brownian motion pinned at U.
inline std::vector<double> sample_s_profile(double scale, std::size_t n, Rng& rng, double* center = nullptr) {
  const double U = rng.uniform();
  if (center) *center = U;
  const double ds = scale / static_cast<double>(n);
  const double sd = std::sqrt(ds);
  const auto iu = std::min(n - 1, static_cast<std::size_t>(U * static_cast<double>(n)));
  std::vector<double> B(n, 0.0);
  for (std::size_t i = iu + 1; i < n; ++i) B[i] = B[i - 1] + sd * rng.normal();
  for (std::size_t i = iu; i-- > 0;) B[i] = B[i + 1] + sd * rng.normal();
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n);
    w[i] = std::exp(B[i] * kInvSqrt2 - scale * std::abs(t - U) / 4.0);
  }
  return w;
}

// ---------------------------------------------------------------------------
// Trigonometric sums.

struct TrigSumReport {
  double k = 0.0;
  double x = 0.0;
  double t = 0.0;
  std::size_t L = 0;
  /// sin, cos -> 0; sin^2, cos^2 -> t/2; sin^4, cos^4 -> 3t/8; sin^2 cos^2 -> t/8; cos^3 sin -> 0.
  std::vector<double> averaged;
  std::vector<double> averaged_limit;
  /// Same integrands weighted by 1/(L-j) instead of 1/L.
  std::vector<double> weighted;
  std::vector<double> weighted_limit;

  [[nodiscard]] double max_averaged_error() const {
    double e = 0;
    for (std::size_t i = 0; i < averaged.size(); ++i) e = std::max(e, std::abs(averaged[i] - averaged_limit[i]));
    return e;
  }
  [[nodiscard]] double max_weighted_error() const {
    double e = 0;
    for (std::size_t i = 0; i < weighted.size(); ++i) e = std::max(e, std::abs(weighted[i] - weighted_limit[i]));
    return e;
  }
};

inline std::vector<std::string> trig_sum_labels() {
  return {"sin", "cos", "sin^2", "cos^2", "sin^4", "cos^4", "sin^2cos^2", "cos^3sin"};
}

/// Partial sums over j = 1..floor(L t) of the integrands at x - eta_j, eta_j = (2j-1)k.
/// The weighted sums need t < 1.
inline TrigSumReport trig_sum_check(double k, double x, double t, std::size_t L) {
  if (!(k > -kPi && k < -kPi / 2.0)) throw std::invalid_argument("trig_sum_check: k must lie in (-pi, -pi/2)");
  if (std::abs(k + 0.75 * kPi) < 1e-9) throw EnergyError("trig_sum_check: excluded k = -3pi/4");
  if (!(t > 0.0)) throw std::invalid_argument("trig_sum_check: t must be > 0");
  TrigSumReport rep;
  rep.k = k;
  rep.x = x;
  rep.t = t;
  rep.L = L;
  const auto J = static_cast<std::size_t>(std::floor(static_cast<double>(L) * t));
  std::vector<double> a(8, 0.0), w(8, 0.0);
  const bool weighted = t < 1.0;
  for (std::size_t j = 1; j <= J; ++j) {
    const double ang = x - (2.0 * static_cast<double>(j) - 1.0) * k;
    const double s = std::sin(ang);
    const double c = std::cos(ang);
    const double v[8] = {s, c, s * s, c * c, s * s * s * s, c * c * c * c, s * s * c * c, c * c * c * s};
    const double wt = weighted ? 1.0 / static_cast<double>(L - j) : 0.0;
    for (int i = 0; i < 8; ++i) {
      a[static_cast<std::size_t>(i)] += v[i];
      w[static_cast<std::size_t>(i)] += v[i] * wt;
    }
  }
  for (double& v : a) v /= static_cast<double>(L);
  rep.averaged = a;
  rep.averaged_limit = {0.0, 0.0, t / 2.0, t / 2.0, 3.0 * t / 8.0, 3.0 * t / 8.0, t / 8.0, 0.0};
  if (weighted) {
    const double I = -std::log1p(-t);  // int_0^t ds/(1-s)
    rep.weighted = w;
    rep.weighted_limit = {0.0, 0.0, I / 2.0, I / 2.0, 3.0 * I / 8.0, 3.0 * I / 8.0, I / 8.0, 0.0};
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Time change between the Model II form and the Sine SDE.

struct TimeChangeReport {
  double beta = 0.0;
  double sigma = 0.0;
  double lambda = 0.0;
  std::vector<double> unit_times;  ///< s in (0, 1)
  std::vector<TestResult> ks;      ///< per marginal

  [[nodiscard]] double min_p() const {
    double p = 1.0;
    for (const auto& r : ks) p = std::min(p, r.p_value);
    return p;
  }
};

/// Compares alpha^lambda(t) from the Sine SDE with the relative phase
/// vartheta^lambda(s) - vartheta^0(s) of the Model II form, s = 1 - e^{-beta t/4}.
inline TimeChangeReport time_change_check(double beta, double sigma, double lambda,
                                          const std::vector<double>& unit_times, std::size_t paths, double dt,
                                          std::uint64_t seed) {
  TimeChangeReport rep;
  rep.beta = beta;
  rep.sigma = sigma;
  rep.lambda = lambda;
  rep.unit_times = unit_times;
  const double s_max = *std::max_element(unit_times.begin(), unit_times.end());
  std::vector<double> sine_times;
  for (double s : unit_times) sine_times.push_back(unit_to_sine_time(s, beta));
  const double T_sine = *std::max_element(sine_times.begin(), sine_times.end());
  std::vector<std::vector<double>> pre(unit_times.size()), post(unit_times.size());
  SineOptions so;
  for (std::size_t p = 0; p < paths; ++p) {
    const auto a = simulate_sine2_family({0.0, lambda}, sigma, s_max, dt, derive_seed(seed, 1, p), unit_times);
    // Sine time runs 4/(beta (1-s)) times faster; keep the unit-time resolution.
    const auto b = simulate_sine_family({0.0, lambda}, beta, T_sine, dt, derive_seed(seed, 2, p), so, sine_times);
    for (std::size_t i = 0; i < unit_times.size(); ++i) {
      pre[i].push_back(a.phase[1][i] - a.phase[0][i]);
      post[i].push_back(b.path.phase[1][i]);
    }
  }
  for (std::size_t i = 0; i < unit_times.size(); ++i) rep.ks.push_back(ks_two_sample(pre[i], post[i]));
  return rep;
}

}  // namespace dirac
