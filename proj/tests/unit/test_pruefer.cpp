#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <sstream>

#include "dirac/pruefer.hpp"
#include "dirac/stats.hpp"
#include "dirac/tridiagonal.hpp"

using namespace dirac;

namespace {

ModelConfig config(PotentialModel model, std::size_t L, double alpha = 0.5, double gamma = 1.0, double m = 0.0,
                   double E = 1.0) {
  ModelConfig c;
  c.model = model;
  c.L = L;
  c.alpha = alpha;
  c.gamma = gamma;
  c.m = m;
  c.E = E;
  return c;
}

// Last diagonal entry of (M - z)^{-1} by forward elimination on the tridiagonal system.
double resolvent_last(const BoxMatrix& b, double z) {
  const std::size_t n = b.dim();
  double d = b.diag[0] - z;
  for (std::size_t i = 1; i < n; ++i) d = b.diag[i] - z - b.offdiag[i - 1] * b.offdiag[i - 1] / d;
  return 1.0 / d;
}

double dist_to_lattice(double x) { return std::abs(std::remainder(x, kTwoPi)); }

}  // namespace

TEST(BasisMatrix, FirstSiteExample) {
  const auto f = energy_frame(1.0, 0.0, 10);
  const auto P = basis_matrix(1, f);
  const double k = -2.0 * kPi / 3.0;
  EXPECT_NEAR(P.a, -std::cos(k), 1e-14);
  EXPECT_NEAR(P.b, -std::sin(k), 1e-14);
  EXPECT_NEAR(P.c, 1.0, 1e-14);
  EXPECT_NEAR(P.d, 0.0, 1e-14);
}

TEST(BasisMatrix, DeterminantIndependentOfSite) {
  const auto f = energy_frame(1.3, 0.4, 10);
  const double d1 = std::abs(basis_matrix(1, f).det());
  EXPECT_GT(d1, 0.0);
  for (long n = 1; n <= 100; ++n) EXPECT_NEAR(std::abs(basis_matrix(n, f).det()), d1, 1e-12);
  EXPECT_NEAR(d1, std::sqrt(-f.p1) * std::sqrt(f.p2) * std::abs(std::sin(f.k)), 1e-12);
}

TEST(BasisMatrix, TwoSitesApartDifferByRotation) {
  const auto f = energy_frame(0.8, 0.1, 10);
  const double a = 4.0 * f.k;
  const Mat2 R{std::cos(a), std::sin(a), -std::sin(a), std::cos(a)};
  for (long n : {1, 2, 5, 17}) {
    const auto lhs = basis_matrix(n + 2, f);
    const auto rhs = basis_matrix(n, f) * R;
    EXPECT_NEAR(lhs.a, rhs.a, 1e-12);
    EXPECT_NEAR(lhs.b, rhs.b, 1e-12);
    EXPECT_NEAR(lhs.c, rhs.c, 1e-12);
    EXPECT_NEAR(lhs.d, rhs.d, 1e-12);
  }
}

// The free transfer step maps P_n onto P_{n+1}: P_{n+1}^{-1} T P_n = I.
TEST(BasisMatrix, ConjugatesFreeStepToIdentity) {
  const auto f = energy_frame(1.2, 0.3, 10);
  const auto T = transfer_matrix(0.0, 0.0, f.E, f.m);
  for (long n : {0, 1, 2, 3, 8}) {
    const auto M = basis_matrix(n + 1, f).inverse() * T * basis_matrix(n, f);
    EXPECT_NEAR(M.a, 1.0, 1e-12);
    EXPECT_NEAR(M.b, 0.0, 1e-12);
    EXPECT_NEAR(M.c, 0.0, 1e-12);
    EXPECT_NEAR(M.d, 1.0, 1e-12);
  }
}

TEST(Trajectory, FreeAtZeroShiftIsStationary) {
  const auto c = config(PotentialModel::Free, 50, 0.0, 0.0);
  const auto f = energy_frame(c);
  const auto t = pruefer_trajectory(0.0, f, potentials_for(c, {}));
  ASSERT_EQ(t.theta.size(), 51U);
  for (std::size_t j = 0; j <= 50; ++j) {
    EXPECT_EQ(t.theta[j], 0.0);
    EXPECT_EQ(t.r[j], 0.0);
    EXPECT_NEAR(t.eta[j], (2.0 * static_cast<double>(j) - 1.0) * f.k, 1e-12);
  }
}

// theta gains lambda/2: the boundary phase 2 theta then advances by 2 pi between
// consecutive free eigenvalues, whose rescaled spacing is 2 pi.
TEST(Trajectory, FreeDriftIsHalfLambda) {
  const std::size_t L = 4000;
  const auto c = config(PotentialModel::Free, L, 0.0, 0.0);
  const auto f = energy_frame(c);
  const auto pot = potentials_for(c, {});
  const double scale = f.rho * static_cast<double>(L);
  const auto ev = eigenvalues_in(build_matrix(c, pot), f.E - 10.0 / scale, f.E + 10.0 / scale);
  ASSERT_GE(ev.size(), 3U);
  for (std::size_t i = 1; i < ev.size(); ++i) EXPECT_NEAR(scale * (ev[i] - ev[i - 1]), kTwoPi, 0.01);
  for (double lam : {-3.0, 1.0, 4.0}) {
    const auto t = pruefer_trajectory(lam, f, pot);
    EXPECT_NEAR(t.theta.back(), 0.5 * lam, 0.01);
  }
}

TEST(Trajectory, IncrementsStayOnPrincipalBranch) {
  const auto c = config(PotentialModel::ModelI, 800);
  const auto f = energy_frame(c);
  const auto t = pruefer_trajectory(3.0, f, potentials_for(c, sample_env(Distribution::UniformSym, 5, c.L)));
  EXPECT_LT(t.max_gamma, 0.5);
  for (std::size_t j = 1; j < t.theta.size(); ++j) EXPECT_LT(std::abs(t.theta[j] - t.theta[j - 1]), kPi / 2.0);
}

// The reversed envelope reaches O(1) near the right edge, so only the lifted
// branch can run it to the end of the box.
TEST(Trajectory, ReversedModelNeedsLift) {
  const auto c = config(PotentialModel::ModelIIReversed, 600);
  const auto f = energy_frame(c);
  const auto pot = potentials_for(c, sample_env(Distribution::Rademacher, 12, c.L));
  EXPECT_THROW(pruefer_trajectory(0.0, f, pot, BranchPolicy::StrictContraction), ContractionError);
  const auto t = pruefer_trajectory(0.0, f, pot, BranchPolicy::ExactLift);
  EXPECT_TRUE(std::isfinite(t.theta.back()));
}

TEST(Trajectory, ContractionGuard) {
  const auto c = config(PotentialModel::ModelI, 4, 0.5, 5.0);
  const auto f = energy_frame(c);
  const auto pot = potentials_for(c, sample_env(Distribution::Rademacher, 1, c.L));
  EXPECT_THROW(pruefer_trajectory(0.0, f, pot, BranchPolicy::StrictContraction), ContractionError);
  EXPECT_NO_THROW(pruefer_trajectory(0.0, f, pot, BranchPolicy::ExactLift));
}

TEST(Trajectory, ExactLiftAgreesInContractionRegime) {
  const auto c = config(PotentialModel::ModelI, 600);
  const auto f = energy_frame(c);
  const auto pot = potentials_for(c, sample_env(Distribution::UniformSym, 12, c.L));
  const auto a = pruefer_trajectory(2.0, f, pot, BranchPolicy::StrictContraction);
  const auto b = pruefer_trajectory(2.0, f, pot, BranchPolicy::ExactLift);
  EXPECT_NEAR(a.theta.back(), b.theta.back(), 1e-12);
  EXPECT_NEAR(a.r.back(), b.r.back(), 1e-12);
}

// zeta(j+1) = (1 + Gamma_j) zeta(j) propagated directly in complex arithmetic.
TEST(Trajectory, RadiusAndPhaseMatchComplexPropagation) {
  const auto c = config(PotentialModel::ModelI, 300);
  const auto f = energy_frame(c);
  const auto pot = potentials_for(c, sample_env(Distribution::UniformSym, 21, c.L));
  const double lam = 1.7;
  const auto t = pruefer_trajectory(lam, f, pot);
  const PrueferKernel kernel(f, BranchPolicy::StrictContraction);
  std::complex<double> z = std::polar(1.0, initial_phase(f));
  double unwound = initial_phase(f);
  const double shift = lam / (f.rho * static_cast<double>(c.L));
  for (std::size_t j = 0; j < c.L; ++j) {
    auto [v1, v2] = step_potentials(pot, j, shift);
    const double eta = (2.0 * static_cast<double>(j) - 1.0) * f.k;
    const auto zn = z * (1.0 + kernel.gamma(std::arg(z) - eta, v1, v2));
    unwound += std::arg(zn / z);
    z = zn;
    EXPECT_NEAR(std::log(std::abs(z)), t.r[j + 1], 1e-9 * std::max(1.0, std::abs(t.r[j + 1])));
    EXPECT_NEAR(unwound - initial_phase(f), t.theta[j + 1], 1e-9);
  }
}

TEST(Trajectory, CsvDump) {
  const auto c = config(PotentialModel::Free, 2, 0.0, 0.0);
  std::ostringstream os;
  write_trajectory_csv(os, pruefer_trajectory(0.0, energy_frame(c), potentials_for(c, {})));
  const std::string s = os.str();
  EXPECT_NE(s.find("j,theta,r\n0,0,0\n1,0,0\n2,0,0\n"), std::string::npos);
}

TEST(BoundaryPhase, MonotoneInLambda) {
  for (auto model : {PotentialModel::ModelI, PotentialModel::ModelIIReversed, PotentialModel::ModelII}) {
    const auto c = config(model, 400);
    const auto f = energy_frame(c);
    const PhaseSolver s(f, potentials_for(c, sample_env(Distribution::Rademacher, 3, c.L)));
    double prev = -1e300;
    for (int i = 0; i < 200; ++i) {
      const double v = s.boundary_phase(-20.0 + 0.2 * i);
      ASSERT_GT(v, prev);
      prev = v;
    }
  }
}

TEST(BoundaryPhase, EigenvalueConditionAtOracleEigenvalues) {
  const auto c = config(PotentialModel::ModelI, 120, 0.5, 1.0, 0.3, 1.1);
  const auto f = energy_frame(c);
  const auto pot = potentials_for(c, sample_env(Distribution::UniformSym, 8, c.L));
  const double scale = f.rho * static_cast<double>(c.L);
  const auto ev = eigenvalues_in(build_matrix(c, pot), f.E - 15.0 / scale, f.E + 15.0 / scale);
  ASSERT_FALSE(ev.empty());
  for (double e : ev) EXPECT_LE(dist_to_lattice(boundary_phase(scale * (e - f.E), f, pot) - level_offset(f)), 1e-6);
}

TEST(SolveSpectrum, MatchesEigensolver) {
  for (auto model : {PotentialModel::ModelI, PotentialModel::ModelIIReversed, PotentialModel::ModelII})
    for (std::size_t L : {10, 60, 200})
      for (double alpha : {0.5, 0.75})
        for (double gamma : {0.0, 0.5, 1.0}) {
          const auto c = config(model, L, alpha, gamma);
          const auto f = energy_frame(c);
          const auto pot = potentials_for(c, sample_env(Distribution::UniformSym, L + 1, L));
          const double scale = f.rho * static_cast<double>(L);
          const auto ev = eigenvalues_in(build_matrix(c, pot), f.E - 20.0 / scale, f.E + 20.0 / scale);
          const auto ps = solve_spectrum_by_phase(f, pot, -20.0, 20.0);
          ASSERT_EQ(ps.size(), ev.size());
          EXPECT_TRUE(ps.strictly_increasing());
          for (std::size_t i = 0; i < ev.size(); ++i) EXPECT_NEAR(ps.points[i], scale * (ev[i] - f.E), 1e-6);
        }
}

TEST(SolveSpectrum, EmptyBetweenConsecutiveLevels) {
  const auto c = config(PotentialModel::ModelI, 100);
  const auto f = energy_frame(c);
  const auto pot = potentials_for(c, sample_env(Distribution::Rademacher, 4, c.L));
  const auto ps = solve_spectrum_by_phase(f, pot, -20.0, 20.0);
  ASSERT_GE(ps.size(), 2U);
  const double a = ps.points[0] + 1e-4;
  const double b = ps.points[1] - 1e-4;
  EXPECT_TRUE(solve_spectrum_by_phase(f, pot, a, b).empty());
}

TEST(SolveSpectrum, CountMatchesLevelFormula) {
  const auto c = config(PotentialModel::ModelIIReversed, 150);
  const auto f = energy_frame(c);
  const auto pot = potentials_for(c, sample_env(Distribution::Rademacher, 6, c.L));
  const PhaseSolver s(f, pot);
  for (auto [lo, hi] : {std::pair{-17.3, 11.9}, std::pair{0.4, 30.2}}) {
    const auto n = static_cast<long>(std::floor(s.level(hi)) - std::ceil(s.level(lo)) + 1);
    EXPECT_EQ(static_cast<long>(s.solve_spectrum(lo, hi).size()), n);
  }
}

TEST(SolveSpectrum, RejectsBadWindow) {
  const auto c = config(PotentialModel::ModelI, 20);
  const auto f = energy_frame(c);
  const auto pot = potentials_for(c, sample_env(Distribution::Rademacher, 6, c.L));
  EXPECT_THROW(solve_spectrum_by_phase(f, pot, 1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(solve_spectrum_by_phase(f, pot, -INFINITY, 1.0), std::invalid_argument);
}

TEST(BoundaryGreen, MatchesDirectResolvent) {
  for (auto model : {PotentialModel::Free, PotentialModel::ModelI, PotentialModel::ModelIIReversed})
    for (std::size_t L : {5, 40, 100}) {
      const auto c = config(model, L, 0.5, model == PotentialModel::Free ? 0.0 : 1.0, 0.2, 1.3);
      const auto f = energy_frame(c);
      const auto pot = potentials_for(c, sample_env(Distribution::UniformSym, 2 * L, L));
      const auto b = build_matrix(c, pot);
      const double scale = f.rho * static_cast<double>(L);
      for (double lam : {-7.1, -2.3, 0.35, 4.9, 11.0}) {
        const double g = boundary_green(lam, f, pot);
        const double direct = resolvent_last(b, f.E + lam / scale);
        EXPECT_NEAR(g, direct, 1e-6 * std::max(1.0, std::abs(direct))) << "L = " << L << " lambda = " << lam;
      }
    }
}

TEST(BoundaryGreen, IncreasingBetweenPolesWhichAreEigenvalues) {
  const auto c = config(PotentialModel::ModelI, 80);
  const auto f = energy_frame(c);
  const auto pot = potentials_for(c, sample_env(Distribution::Rademacher, 9, c.L));
  const auto poles = solve_spectrum_by_phase(f, pot, -15.0, 15.0);
  ASSERT_GE(poles.size(), 3U);
  for (std::size_t i = 0; i + 1 < poles.size(); ++i) {
    const double a = poles.points[i], b = poles.points[i + 1];
    double prev = -1e300;
    for (int s = 1; s < 50; ++s) {
      const double g = boundary_green(a + (b - a) * s / 50.0, f, pot);
      EXPECT_GT(g, prev);
      prev = g;
    }
    EXPECT_LT(boundary_green(a + 1e-7, f, pot), -1e3);
    EXPECT_GT(boundary_green(b - 1e-7, f, pot), 1e3);
  }
}

TEST(RadiusLaw, ModelIMatchesGaussianLaw) {
  const auto r = radius_law_check(config(PotentialModel::ModelI, 2000), 1.0, 500, 8);
  EXPECT_NEAR(r.target_mean, 1.0 / 3.0, 1e-12);
  EXPECT_LE(std::abs(r.z_mean), 3.0);
  EXPECT_LE(std::abs(r.z_variance), 3.0);
}

TEST(RadiusLaw, DegenerateCases) {
  const auto free = radius_law_check(config(PotentialModel::ModelI, 300, 0.5, 0.0), 1.0, 10, 1);
  EXPECT_EQ(free.target_mean, 0.0);
  EXPECT_EQ(free.sample.mean, 0.0);
  EXPECT_EQ(free.sample.variance, 0.0);
  const auto start = radius_law_check(config(PotentialModel::ModelI, 300), 0.0, 10, 1);
  EXPECT_EQ(start.sample.mean, 0.0);
  EXPECT_THROW(radius_law_check(config(PotentialModel::ModelI, 300), 1.5, 10, 1), std::invalid_argument);
}
