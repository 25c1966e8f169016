#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "cob/error.hpp"
#include "cob/sampling.hpp"
#include "cob/stats.hpp"

namespace cob {
namespace {

double literal_normalizer(double gamma, int n) {
  double z = 0.0;
  for (int k = 1; k <= n; ++k) z += std::pow(static_cast<double>(k), -gamma);
  return z;
}

TEST(Rng, SameSeedSameStream) {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
}

TEST(Rng, Mt19937ReferenceValue) {
  // The standard fixes the 10000th output of a default-seeded mt19937_64.
  Rng rng(5489u);
  std::uint64_t x = 0;
  for (int i = 0; i < 10000; ++i) x = rng.next_u64();
  EXPECT_EQ(x, 9981545732273789042ull);
}

TEST(Rng, UniformAndBelowRanges) {
  Rng rng(7);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform01();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    ASSERT_LT(rng.below(7), 7u);
  }
  EXPECT_EQ(rng.below(1), 0u);
}

TEST(DiscreteSampler, CdfEndsAtExactlyOne) {
  const DiscreteSampler s(power_law_weights(2.5, 777));
  EXPECT_EQ(s.cdf().back(), 1.0);
  const DiscreteSampler t({0.1, 0.2, 0.3});
  EXPECT_EQ(t.cdf().back(), 1.0);
}

TEST(DiscreteSampler, RejectsBadWeights) {
  EXPECT_THROW(DiscreteSampler(std::vector<double>{}), ConfigError);
  EXPECT_THROW(DiscreteSampler({1.0, -0.5}), ConfigError);
  EXPECT_THROW(DiscreteSampler({0.0, 0.0}), ConfigError);
}

TEST(DiscreteSampler, ZeroWeightOutcomeNeverDrawn) {
  const DiscreteSampler s({1.0, 0.0, 1.0});
  Rng rng(3);
  for (int i = 0; i < 10000; ++i) ASSERT_NE(s(rng), 2);
}

TEST(PowerLaw, DegenerateSupport) {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(sample_power_law(2.5, 1, rng), 1);
}

TEST(PowerLaw, RejectsInvalidParameters) {
  EXPECT_THROW(make_power_law(1.0, 100), ConfigError);
  EXPECT_THROW(make_power_law(0.5, 100), ConfigError);
  EXPECT_THROW(make_power_law(2.0, 0), ConfigError);
}

TEST(PowerLaw, ProbabilityOfOneMatchesLiteralSum) {
  const double p1 = 1.0 / literal_normalizer(2.5, 100);
  const auto s = make_power_law(2.5, 100);
  EXPECT_NEAR(s.probability(0), p1, 1e-12);

  constexpr int kDraws = 1000000;
  Rng rng(11);
  int ones = 0;
  for (int i = 0; i < kDraws; ++i) ones += sample_power_law(2.5, 100, rng) == 1;
  const double sigma = std::sqrt(p1 * (1.0 - p1) / kDraws);
  EXPECT_NEAR(static_cast<double>(ones) / kDraws, p1, 3.0 * sigma);
}

TEST(PowerLaw, TailExponentRecovered) {
  Rng rng(12);
  std::vector<std::int64_t> draws(1000000);
  for (auto& d : draws) d = sample_power_law(2.5, 100, rng);
  const auto fit = fit_power_law(draws, 10, 100);
  EXPECT_NEAR(fit.ols_exponent, 2.5, 0.1);
  EXPECT_NEAR(fit.mle_exponent, 2.5, 0.1);
}

TEST(VolumeSampler, PowerLawMatchesDirectSampler) {
  const VolumeSampler v(PowerLaw{2.5, 100});
  Rng a(5), b(5);
  for (int i = 0; i < 10000; ++i) ASSERT_EQ(v(a), sample_power_law(2.5, 100, b));
}

TEST(VolumeSampler, MeanOfPowerLawIsExplicitSum) {
  const double z = literal_normalizer(2.5, 1000);
  double mean = 0.0;
  for (int k = 1; k <= 1000; ++k) mean += k * std::pow(static_cast<double>(k), -2.5) / z;
  EXPECT_NEAR(VolumeSampler(PowerLaw{2.5, 1000}).mean(), mean, 1e-10);
}

TEST(VolumeSampler, SingleRoundLotComponent) {
  const VolumeSampler v(RoundLotMixture{0.0, 1.0, 0.0, 2.8, 2.5, 2.0, 1000});
  Rng rng(8);
  for (int i = 0; i < 100000; ++i) {
    const auto x = v(rng);
    ASSERT_EQ(x % 10, 0);
    ASSERT_GE(x, 10);
    ASSERT_LE(x, 1000);
  }
}

TEST(VolumeSampler, MixtureFractionsMatchEnumeration) {
  const RoundLotMixture m{0.5, 0.3, 0.2, 2.8, 2.5, 2.0, 1000};
  // Oracle: enumerate each component's law over its multiples.
  auto component = [](int lot, double gamma, std::map<int, double>& pmf, double weight) {
    const int n = 1000 / lot;
    double z = 0.0;
    for (int j = 1; j <= n; ++j) z += std::pow(static_cast<double>(j), -gamma);
    for (int j = 1; j <= n; ++j) pmf[lot * j] += weight * std::pow(static_cast<double>(j), -gamma) / z;
  };
  std::map<int, double> pmf;
  component(1, m.gamma1, pmf, m.w1);
  component(10, m.gamma10, pmf, m.w10);
  component(100, m.gamma100, pmf, m.w100);
  double p10 = 0.0, p100 = 0.0, mean = 0.0;
  for (const auto& [v, p] : pmf) {
    if (v % 100 == 0) {
      p100 += p;
    } else if (v % 10 == 0) {
      p10 += p;
    }
    mean += v * p;
  }

  const VolumeSampler sampler(m);
  EXPECT_NEAR(sampler.mean(), mean, 1e-9);
  const auto enumerated = sampler.pmf();
  for (const auto& [v, p] : pmf) ASSERT_NEAR(enumerated[static_cast<std::size_t>(v - 1)], p, 1e-12);

  constexpr int kDraws = 1000000;
  Rng rng(21);
  int n10 = 0, n100 = 0;
  for (int i = 0; i < kDraws; ++i) {
    const auto x = sampler(rng);
    if (x % 100 == 0) {
      ++n100;
    } else if (x % 10 == 0) {
      ++n10;
    }
  }
  EXPECT_NEAR(static_cast<double>(n10) / kDraws, p10, 3.0 * std::sqrt(p10 * (1 - p10) / kDraws));
  EXPECT_NEAR(static_cast<double>(n100) / kDraws, p100, 3.0 * std::sqrt(p100 * (1 - p100) / kDraws));
}

TEST(VolumeSampler, ValidateRejectsBadMixture) {
  EXPECT_THROW(validate(VolumeModel{RoundLotMixture{0.5, 0.5, 0.5, 2.8, 2.5, 2.0, 1000}}), ConfigError);
  EXPECT_THROW(validate(VolumeModel{RoundLotMixture{0.5, 0.3, 0.2, 0.9, 2.5, 2.0, 1000}}), ConfigError);
  EXPECT_THROW(validate(VolumeModel{PowerLaw{2.5, 0}}), ConfigError);
  EXPECT_NO_THROW(validate(VolumeModel{RoundLotMixture{}}));
}

TEST(LevelSampler, FlatWhenHeadCoversAllLevels) {
  const LevelSampler s(LevelModel{2.5, 1000, 1000});
  for (int l = 1; l <= 1000; l += 111) EXPECT_NEAR(s.probability(l), 1e-3, 1e-15);
}

TEST(LevelSampler, HeadProbabilityMatchesExplicitNormalizer) {
  double z = 0.0;
  for (int l = 1; l <= 1000; ++l) z += l <= 10 ? 1.0 : std::pow(l / 10.0, -2.5);
  const LevelSampler s(LevelModel{2.5, 10, 1000});
  EXPECT_NEAR(s.probability(1), 1.0 / z, 1e-14);
  EXPECT_NEAR(s.probability(10), 1.0 / z, 1e-14);
  EXPECT_NEAR(s.probability(20), std::pow(2.0, -2.5) / z, 1e-14);
}

TEST(LevelSampler, TailExponentRecovered) {
  const LevelSampler s(LevelModel{2.5, 10, 1000});
  Rng rng(31);
  std::vector<std::int64_t> draws(1000000);
  for (auto& d : draws) d = s(rng);
  const auto fit = fit_power_law(draws, 11, 1000);
  EXPECT_NEAR(fit.ols_exponent, 2.5, 0.1);
  EXPECT_NEAR(fit.mle_exponent, 2.5, 0.1);
}

TEST(LevelSampler, ValidateRejectsBadModel) {
  EXPECT_THROW(validate(LevelModel{1.0, 10, 1000}), ConfigError);
  EXPECT_THROW(validate(LevelModel{2.5, 0, 1000}), ConfigError);
  EXPECT_THROW(validate(LevelModel{2.5, 10, 0}), ConfigError);
}

}  // namespace
}  // namespace cob
