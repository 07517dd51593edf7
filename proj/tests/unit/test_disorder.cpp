#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "dirac/disorder.hpp"

using namespace dirac;

namespace {

DisorderRealization ones(std::size_t L) {
  DisorderRealization env;
  env.omega1.assign(L + 1, 1.0);
  env.omega2.assign(L + 1, 1.0);
  return env;
}

}  // namespace

TEST(SampleEnv, RademacherTakesValuesPlusMinusOne) {
  const auto env = sample_env(Distribution::Rademacher, 7, 1000);
  std::set<double> seen(env.omega1.begin(), env.omega1.end());
  seen.insert(env.omega2.begin(), env.omega2.end());
  EXPECT_EQ(seen, (std::set<double>{-1.0, 1.0}));
}

TEST(SampleEnv, HasLPlusOnePairs) {
  const auto env = sample_env(Distribution::UniformSym, 3, 17);
  EXPECT_EQ(env.size(), 18U);
  EXPECT_EQ(env.omega2.size(), 18U);
  EXPECT_EQ(env.w1(18), env.omega1.back());
}

TEST(SampleEnv, UniformIsBoundedAndHasUnitVariance) {
  const auto env = sample_env(Distribution::UniformSym, 11, 1000000);
  double s = 0, s2 = 0;
  for (double w : env.omega1) {
    ASSERT_LE(std::abs(w), std::sqrt(3.0));
    s += w;
    s2 += w * w;
  }
  const double n = static_cast<double>(env.size());
  const double mean = s / n;
  EXPECT_NEAR(s2 / n - mean * mean, 1.0, 0.01);
}

TEST(SampleEnv, MomentsAtLargeL) {
  const std::size_t L = 100000;
  for (auto dist : {Distribution::Rademacher, Distribution::UniformSym}) {
    const auto env = sample_env(dist, 5, L);
    double s = 0, s2 = 0;
    for (double w : env.omega2) {
      s += w;
      s2 += w * w;
    }
    const double n = static_cast<double>(env.size());
    EXPECT_LE(std::abs(s / n), 4.0 / std::sqrt(static_cast<double>(L)));
    EXPECT_LE(std::abs(s2 / n - (s / n) * (s / n) - 1.0), 10.0 / std::sqrt(static_cast<double>(L)));
  }
}

TEST(SampleEnv, SameSeedReproduces) {
  for (auto dist : {Distribution::Rademacher, Distribution::UniformSym}) {
    const auto a = sample_env(dist, 42, 100);
    const auto b = sample_env(dist, 42, 100);
    EXPECT_EQ(a.omega1, b.omega1);
    EXPECT_EQ(a.omega2, b.omega2);
  }
}

TEST(SampleEnv, DifferentSeedsDiffer) {
  EXPECT_NE(sample_env(Distribution::UniformSym, 1, 50).omega1, sample_env(Distribution::UniformSym, 2, 50).omega1);
}

TEST(SampleEnv, PrefixIsSharedAcrossBoxLengths) {
  const auto a = sample_env(Distribution::UniformSym, 9, 10);
  const auto b = sample_env(Distribution::UniformSym, 9, 40);
  for (std::size_t n = 1; n <= 11; ++n) {
    EXPECT_EQ(a.w1(n), b.w1(n));
    EXPECT_EQ(a.w2(n), b.w2(n));
  }
}

TEST(SampleEnv, RejectsEmptyBox) { EXPECT_THROW(sample_env(Distribution::Rademacher, 1, 0), std::invalid_argument); }

TEST(DeriveSeed, StreamsAreDistinct) {
  std::set<std::uint64_t> s;
  for (std::uint64_t i = 0; i < 1000; ++i) s.insert(derive_seed(123, i));
  EXPECT_EQ(s.size(), 1000U);
  EXPECT_NE(derive_seed(1, 2, 3), derive_seed(1, 3, 2));
}

TEST(PotentialSequence, ModelIConstantEnvelope) {
  const auto p = potential_sequence(PotentialModel::ModelI, ones(100), 100, 0.5, 2.0);
  for (std::size_t n = 1; n <= 100; ++n) {
    EXPECT_DOUBLE_EQ(p.V1(n), 0.2);
    EXPECT_DOUBLE_EQ(p.V2(n), 0.2);
  }
}

TEST(PotentialSequence, ModelIIDecaysLikeOneOverN) {
  const auto p = potential_sequence(PotentialModel::ModelII, ones(37), 37, 1.0, 1.0);
  for (std::size_t n = 1; n <= 37; ++n) {
    EXPECT_DOUBLE_EQ(p.V1(n), 1.0 / static_cast<double>(n));
    EXPECT_DOUBLE_EQ(p.V2(n), 1.0 / static_cast<double>(n));
  }
}

TEST(PotentialSequence, FreeIsZero) {
  const auto env = sample_env(Distribution::UniformSym, 4, 20);
  const auto p = potential_sequence(PotentialModel::Free, env, 20, 0.0, 3.0);
  for (std::size_t n = 1; n <= 20; ++n) {
    EXPECT_EQ(p.V1(n), 0.0);
    EXPECT_EQ(p.V2(n), 0.0);
  }
}

TEST(PotentialSequence, ReversedEnvelope) {
  const std::size_t L = 9;
  const auto env = sample_env(Distribution::UniformSym, 8, L);
  const auto p = potential_sequence(PotentialModel::ModelIIReversed, env, L, 0.5, 1.5);
  for (std::size_t n = 1; n < L; ++n)
    EXPECT_DOUBLE_EQ(p.V1(n), 1.5 * env.w1(n) / std::sqrt(static_cast<double>(L - n)));
  EXPECT_EQ(p.V1(L), 0.0);
  for (std::size_t n = 1; n <= L; ++n)
    EXPECT_DOUBLE_EQ(p.V2(n), 1.5 * env.w2(n) / std::sqrt(static_cast<double>(L - n + 1)));
}

TEST(PotentialSequence, ReversedEnvelopeRejectsRightEdge) {
  EXPECT_THROW(envelope(PotentialModel::ModelIIReversed, 10, 10, 0.5), std::domain_error);
  EXPECT_NO_THROW(envelope(PotentialModel::ModelIIReversed, 9, 10, 0.5));
}

TEST(PotentialSequence, RejectsBadParameters) {
  const auto env = ones(10);
  EXPECT_THROW(potential_sequence(PotentialModel::ModelI, env, 10, 0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(potential_sequence(PotentialModel::ModelI, env, 10, 0.5, -1.0), std::invalid_argument);
  EXPECT_THROW(potential_sequence(PotentialModel::ModelI, env, 20, 0.5, 1.0), std::invalid_argument);
}

TEST(PotentialSequence, CsvExport) {
  auto env = ones(2);
  env.seed = 5;
  std::ostringstream os;
  write_realization_csv(os, env);
  EXPECT_EQ(os.str(), "# seed=5 dist=rademacher\nn,omega1,omega2\n1,1,1\n2,1,1\n3,1,1\n");
}
