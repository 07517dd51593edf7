#include <gtest/gtest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <sstream>

#include "dirac/pruefer.hpp"
#include "dirac/rng.hpp"
#include "dirac/tridiagonal.hpp"

using namespace dirac;

namespace {

PotentialSequence free_potential(std::size_t L) {
  return potential_sequence(PotentialModel::Free, DisorderRealization{}, L, 0.0, 0.0);
}

}  // namespace

TEST(Dispersion, Examples) {
  EXPECT_NEAR(dispersion_k(1.0, 0.0), -2.0 * kPi / 3.0, 1e-14);
  EXPECT_NEAR(dispersion_k(2.0, 1.0), -5.0 * kPi / 6.0, 1e-14);
}

TEST(Dispersion, SatisfiesDefiningRelation) {
  for (double m : {0.0, 0.3, 1.0})
    for (double u : {0.1, 0.37, 0.6, 0.93}) {
      const double E = m + u * (band_top(m) - m);
      if (std::abs(E - std::sqrt(m * m + 2.0)) < 1e-6) continue;
      const double k = dispersion_k(E, m);
      EXPECT_GT(k, -kPi);
      EXPECT_LT(k, -kPi / 2.0);
      EXPECT_NEAR(std::cos(k), -0.5 * std::sqrt(E * E - m * m), 1e-14);
    }
}

TEST(Dispersion, Errors) {
  EXPECT_THROW(dispersion_k(std::sqrt(2.0), 0.0), EnergyError);
  try {
    dispersion_k(std::sqrt(3.0), 1.0);
    FAIL();
  } catch (const EnergyError& e) {
    EXPECT_NE(std::string(e.what()).find("excluded energy"), std::string::npos);
  }
  EXPECT_THROW(dispersion_k(0.5, 1.0), EnergyError);
  EXPECT_THROW(dispersion_k(2.0, 0.0), EnergyError);
  EXPECT_THROW(dispersion_k(-1.0, 0.0), EnergyError);
}

TEST(RhoDensity, Examples) {
  EXPECT_NEAR(rho_density(1.0, 0.0), 4.0 / std::sqrt(3.0), 1e-12);
  EXPECT_NEAR(rho_density(2.0, 1.0), 8.0 / std::sqrt(3.0), 1e-12);
  EXPECT_NEAR(rho_density(-1.0, 0.0), 4.0 / std::sqrt(3.0), 1e-12);
}

TEST(RhoDensity, RejectsEdgesAndGap) {
  EXPECT_THROW(rho_density(1.0, 1.0), EnergyError);
  EXPECT_THROW(rho_density(std::sqrt(5.0), 1.0), EnergyError);
  EXPECT_THROW(rho_density(0.5, 1.0), EnergyError);
}

TEST(RhoDensity, BandMassIsOne) {
  boost::math::quadrature::tanh_sinh<double> q;
  for (double m : {0.0, 0.5, 1.0, 2.0}) {
    const double top = band_top(m);
    // xc is the signed distance to the nearer endpoint, which keeps the
    // inverse square roots accurate near the band edges.
    auto f = [m, top](double E, double xc) {
      const double lo = E < 0.5 * (m + top) ? -xc : E - m;
      const double hi = E < 0.5 * (m + top) ? top - E : xc;
      return 4.0 * E / (std::sqrt(lo) * std::sqrt(E + m) * std::sqrt(hi) * std::sqrt(top + E)) / kTwoPi;
    };
    EXPECT_NEAR(q.integrate(f, m, top), 1.0, 1e-6) << "m = " << m;
  }
}

TEST(EnergyFrame, Examples) {
  const auto f = energy_frame(1.0, 0.0, 10);
  EXPECT_NEAR(f.sigma2_total, 8.0 / 3.0, 1e-12);
  EXPECT_NEAR(f.sigma1, 2.0 / std::sqrt(3.0), 1e-12);
  EXPECT_NEAR(f.sigma2, 2.0 / std::sqrt(3.0), 1e-12);
  EXPECT_NEAR(energy_frame(2.0, 1.0, 10).sigma2_total, 40.0 / 3.0, 1e-12);
}

TEST(EnergyFrame, Invariants) {
  for (double E : {0.4, 1.0, 1.7}) {
    const auto f = energy_frame(E, 0.2, 33);
    EXPECT_GT(f.sigma1, 0.0);
    EXPECT_GT(f.sigma2, 0.0);
    const double s = std::sin(2.0 * f.k);
    EXPECT_NEAR(f.sigma2_total, (f.p1 * f.p1 + f.p2 * f.p2) / (s * s), 1e-12);
    EXPECT_NEAR(f.eta_L_raw, 65.0 * f.k, 1e-12);
    EXPECT_GE(f.eta_L, 0.0);
    EXPECT_LT(f.eta_L, kTwoPi);
    EXPECT_NEAR(std::remainder(f.eta_L - f.eta_L_raw, kTwoPi), 0.0, 1e-12);
  }
}

TEST(BuildMatrix, SingleSite) {
  const auto b = build_matrix(0.0, free_potential(1));
  ASSERT_EQ(b.dim(), 1U);
  EXPECT_EQ(b.diag[0], 0.0);
  EXPECT_TRUE(b.offdiag.empty());
}

TEST(BuildMatrix, TwoSitesFree) {
  const auto b = build_matrix(0.0, free_potential(2));
  EXPECT_EQ(b.diag, (std::vector<double>{0.0, 0.0, 0.0}));
  EXPECT_EQ(b.offdiag, (std::vector<double>{1.0, -1.0}));
  // det(x - M) = x^3 - 2x for this matrix.
  const auto ev = eigenvalues(b);
  ASSERT_EQ(ev.size(), 3U);
  for (double x : ev) EXPECT_NEAR(x * x * x - 2.0 * x, 0.0, 1e-12);
  EXPECT_NEAR(ev[0], -std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(ev[1], 0.0, 1e-12);
  EXPECT_NEAR(ev[2], std::sqrt(2.0), 1e-12);
}

TEST(BuildMatrix, MassDiagonal) {
  const auto b = build_matrix(1.0, free_potential(2));
  EXPECT_EQ(b.diag, (std::vector<double>{-1.0, 1.0, -1.0}));
  EXPECT_EQ(b.offdiag, (std::vector<double>{1.0, -1.0}));
}

TEST(BuildMatrix, PotentialsOnDiagonal) {
  const std::size_t L = 6;
  const auto env = sample_env(Distribution::UniformSym, 2, L);
  const auto pot = potential_sequence(PotentialModel::ModelI, env, L, 0.5, 1.0);
  const auto b = build_matrix(0.7, pot);
  ASSERT_EQ(b.dim(), 2 * L - 1);
  ASSERT_EQ(b.offdiag.size(), 2 * L - 2);
  for (std::size_t n = 1; n <= L; ++n) {
    EXPECT_DOUBLE_EQ(b.diag[2 * (n - 1)], -0.7 + pot.V2(n));
    if (n < L) {
      EXPECT_DOUBLE_EQ(b.diag[2 * (n - 1) + 1], 0.7 + pot.V1(n));
    }
  }
}

TEST(BuildMatrix, LengthMismatch) {
  ModelConfig c;
  c.L = 5;
  EXPECT_THROW(build_matrix(c, free_potential(4)), std::invalid_argument);
}

TEST(BuildMatrix, ChiralSymmetryAtZeroMass) {
  const auto ev = eigenvalues(build_matrix(0.0, free_potential(40)));
  for (std::size_t i = 0; i < ev.size(); ++i) EXPECT_NEAR(ev[i], -ev[ev.size() - 1 - i], 1e-12);
}

TEST(BuildMatrix, SpectrumConcentratesOnBands) {
  const double m = 0.5;
  const std::size_t L = 500;
  const auto ev = eigenvalues(build_matrix(m, free_potential(L)));
  std::size_t outside = 0;
  for (double e : ev) {
    const double a = std::abs(e);
    if (a < m - 1e-12 || a > band_top(m) + 1e-12) ++outside;
  }
  EXPECT_LE(static_cast<double>(outside), 5.0);
}

TEST(BuildMatrix, CsvExport) {
  std::ostringstream os;
  write_matrix_csv(os, build_matrix(1.0, free_potential(2)));
  EXPECT_EQ(os.str(), "i,diag,offdiag\n0,-1,1\n1,1,-1\n2,-1,\n");
}

TEST(EigenvaluesIn, MatchesFullSpectrum) {
  const std::size_t L = 60;
  const auto pot = potential_sequence(PotentialModel::ModelI, sample_env(Distribution::UniformSym, 4, L), L, 0.5, 1.0);
  const auto b = build_matrix(0.3, pot);
  const auto all = eigenvalues(b);
  const auto part = eigenvalues_in(b, 0.5, 1.5);
  std::vector<double> expect;
  for (double e : all)
    if (e > 0.5 && e <= 1.5) expect.push_back(e);
  ASSERT_EQ(part.size(), expect.size());
  for (std::size_t i = 0; i < part.size(); ++i) EXPECT_NEAR(part[i], expect[i], 1e-12);
}

TEST(EigenpairsIn, ResidualsAreSmall) {
  const std::size_t L = 40;
  const auto pot = potential_sequence(PotentialModel::ModelI, sample_env(Distribution::UniformSym, 6, L), L, 0.5, 1.0);
  const auto b = build_matrix(0.0, pot);
  const auto ep = eigenpairs_in(b, 0.5, 1.5);
  ASSERT_FALSE(ep.values.empty());
  for (std::size_t i = 0; i < ep.values.size(); ++i) {
    const auto& v = ep.vectors[i];
    double res = 0.0, nrm = 0.0;
    for (std::size_t r = 0; r < b.dim(); ++r) {
      double y = b.diag[r] * v[r] - ep.values[i] * v[r];
      if (r > 0) y += b.offdiag[r - 1] * v[r - 1];
      if (r + 1 < b.dim()) y += b.offdiag[r] * v[r + 1];
      res = std::max(res, std::abs(y));
      nrm += v[r] * v[r];
    }
    EXPECT_LT(res, 1e-10);
    EXPECT_NEAR(nrm, 1.0, 1e-10);
  }
}

TEST(TransferMatrix, Example) {
  const auto T = transfer_matrix(0.0, 0.0, 1.0, 0.0);
  EXPECT_EQ(T.a, 0.0);
  EXPECT_EQ(T.b, 1.0);
  EXPECT_EQ(T.c, -1.0);
  EXPECT_EQ(T.d, 1.0);
  EXPECT_EQ(T.det(), 1.0);
}

TEST(TransferMatrix, UnitDeterminant) {
  Rng rng(77);
  for (int i = 0; i < 10000; ++i) {
    const auto T = transfer_matrix(rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-4, 4), rng.uniform(0, 3));
    ASSERT_LE(std::abs(T.det() - 1.0), 1e-12);
  }
}

TEST(TransferMatrix, InverseAndProduct) {
  const auto T = transfer_matrix(0.3, -0.2, 1.1, 0.4);
  const auto I = T * T.inverse();
  EXPECT_NEAR(I.a, 1.0, 1e-14);
  EXPECT_NEAR(I.b, 0.0, 1e-14);
  EXPECT_NEAR(I.c, 0.0, 1e-14);
  EXPECT_NEAR(I.d, 1.0, 1e-14);
}

// The transfer recursion must reproduce the box equations row by row.
TEST(TransferMatrix, ReproducesEigenvectorComponents) {
  const std::size_t L = 12;
  const double m = 0.4;
  const auto pot = potential_sequence(PotentialModel::ModelI, sample_env(Distribution::UniformSym, 3, L), L, 0.5, 1.0);
  const auto b = build_matrix(m, pot);
  const auto ep = eigenpairs_in(b, m + 0.1, band_top(m) - 0.1);
  ASSERT_FALSE(ep.values.empty());
  const double e = ep.values[0];
  const auto& v = ep.vectors[0];
  // v = (phi^-_1, phi^+_1, ..., phi^-_L); phi^+_0 = 0, phi^-_0 is a free scale.
  std::array<double, 2> s{0.0, 0.0};
  s[1] = v[0] / transfer_matrix(0.0, pot.V2(1), e, m).apply({0.0, 1.0})[1];
  for (std::size_t j = 0; j < L; ++j) {
    auto [x1, x2] = step_potentials(pot, j, 0.0);
    s = transfer_matrix(x1, x2, e, m).apply(s);
    const double plus = j + 1 < L ? v[2 * j + 1] : 0.0;
    EXPECT_NEAR(s[0], plus, 1e-8) << "j = " << j;
    EXPECT_NEAR(s[1], v[2 * j], 1e-8) << "j = " << j;
  }
}

TEST(Propagation, ZeroSetMatchesEigenvalues) {
  for (auto model : {PotentialModel::Free, PotentialModel::ModelI, PotentialModel::ModelIIReversed}) {
    for (std::size_t L : {2, 7, 30, 50}) {
      ModelConfig c;
      c.model = model;
      c.L = L;
      const auto f = energy_frame(c);
      const auto pot = potentials_for(c, sample_env(Distribution::UniformSym, L, L));
      const double scale = f.rho * static_cast<double>(L);
      const double lo = -15.0, hi = 15.0;
      const auto ev = eigenvalues_in(build_matrix(c, pot), f.E + lo / scale, f.E + hi / scale);
      for (double e : ev) EXPECT_LE(std::abs(propagate_state(f, pot, scale * (e - f.E))[0]), 1e-8);
      // sign changes of phi^+_L on a fine grid count the same eigenvalues
      std::size_t changes = 0;
      double prev = propagate_state(f, pot, lo)[0];
      for (int i = 1; i <= 6000; ++i) {
        const double cur = propagate_state(f, pot, lo + (hi - lo) * i / 6000.0)[0];
        if ((cur > 0) != (prev > 0)) ++changes;
        prev = cur;
      }
      EXPECT_EQ(changes, ev.size()) << "L = " << L;
    }
  }
}

TEST(Propagation, FreeTwoSiteExample) {
  const auto f = energy_frame(1.0, 0.0, 2);
  const auto pot = free_potential(2);
  // eigenvalues of the L = 2 box are 0 and +-sqrt(2); only sqrt(2) lies in the positive band
  const double lam = f.rho * 2.0 * (std::sqrt(2.0) - 1.0);
  EXPECT_LE(std::abs(propagate_state(f, pot, lam)[0]), 1e-12);
  EXPECT_GT(std::abs(propagate_state(f, pot, lam + 0.5)[0]), 1e-3);
}
