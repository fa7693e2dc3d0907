#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "quotaplan/pmf.hpp"
#include "quotaplan/sample.hpp"

using namespace quotaplan;

namespace {

DiscretePMF coin() { return DiscretePMF({0, 1}, {0.5, 0.5}); }
DiscretePMF tri() { return DiscretePMF({0, 1, 2}, {0.25, 0.5, 0.25}); }

// Dyadic probabilities keep every convolution sum exact in binary.
DiscretePMF random_dyadic(std::mt19937_64& gen) {
  std::uniform_int_distribution<int> npoints(1, 5), value(-4, 9), weight(1, 8);
  std::map<std::int64_t, int> w;
  const int n = npoints(gen);
  for (int i = 0; i < n; ++i) w[value(gen)] += weight(gen);
  int total = 0;
  for (auto& [v, c] : w) total += c;
  // Round the total up to a power of two and park the slack on the last point.
  int pow2 = 1;
  while (pow2 < total) pow2 *= 2;
  w.rbegin()->second += pow2 - total;
  std::vector<std::int64_t> s;
  std::vector<double> p;
  for (auto& [v, c] : w) {
    s.push_back(v);
    p.push_back(static_cast<double>(c) / pow2);
  }
  return DiscretePMF(s, p);
}

}  // namespace

TEST(DiscretePMF, RejectsBadInput) {
  EXPECT_THROW(DiscretePMF({}, {}), EmptyDataError);
  EXPECT_THROW(DiscretePMF({0, 1}, {1.0}), ShapeError);
  EXPECT_THROW(DiscretePMF({1, 0}, {0.5, 0.5}), ValidationError);
  EXPECT_THROW(DiscretePMF({0, 0}, {0.5, 0.5}), ValidationError);
  EXPECT_THROW(DiscretePMF({0, 1}, {0.5, 0.49}), ValidationError);
  EXPECT_THROW(DiscretePMF({0, 1}, {1.5, -0.5}), ValidationError);
  EXPECT_NO_THROW(DiscretePMF({0, 1}, {0.5, 0.5 + 5e-10}));
}

TEST(PmfFromCounts, SingleObservation) {
  const auto d = pmf_from_counts({{5, 1}});
  EXPECT_EQ(d.support().size(), 1u);
  EXPECT_EQ(d.support()[0], 5);
  EXPECT_DOUBLE_EQ(d.probs()[0], 1.0);
}

TEST(PmfFromCounts, Proportional) {
  const auto d = pmf_from_counts({{1, 2}, {2, 1}});
  EXPECT_EQ(std::vector<std::int64_t>(d.support().begin(), d.support().end()),
            (std::vector<std::int64_t>{1, 2}));
  EXPECT_NEAR(d.probs()[0], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(d.probs()[1], 1.0 / 3.0, 1e-15);
}

TEST(PmfFromCounts, DropsZeroCounts) {
  const auto d = pmf_from_counts({{0, 3}, {2, 1}, {7, 0}});
  EXPECT_EQ(d, DiscretePMF({0, 2}, {0.75, 0.25}));
}

TEST(PmfFromCounts, EmptyOrAllZero) {
  EXPECT_THROW(pmf_from_counts({}), EmptyDataError);
  EXPECT_THROW(pmf_from_counts({{1, 0}, {2, 0}}), EmptyDataError);
}

TEST(Convolve, Identity) {
  EXPECT_EQ(convolve({tri()}, {Sign::Plus}), tri());
}

TEST(Convolve, TwoCoins) {
  EXPECT_EQ(convolve({coin(), coin()}, {Sign::Plus, Sign::Plus}), tri());
}

TEST(Convolve, PointMassesSubtract) {
  const auto d = convolve({DiscretePMF::point_mass(3), DiscretePMF::point_mass(1)}, {Sign::Plus, Sign::Minus});
  EXPECT_EQ(d, DiscretePMF::point_mass(2));
}

TEST(Convolve, ShapeErrors) {
  EXPECT_THROW(convolve({coin(), coin()}, {Sign::Plus}), ShapeError);
  EXPECT_THROW(convolve(std::span<const DiscretePMF>{}, std::span<const Sign>{}), ShapeError);
}

TEST(Convolve, CapacityCap) {
  const DiscretePMF wide({0, 600'000}, {0.5, 0.5});
  EXPECT_THROW(convolve({wide, wide}, {Sign::Plus, Sign::Plus}), CapacityError);
}

TEST(Convolve, MeanAdditivity) {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<DiscretePMF> parts;
    std::vector<Sign> signs;
    double expected = 0.0;
    const int k = 1 + trial % 4;
    for (int i = 0; i < k; ++i) {
      parts.push_back(random_dyadic(gen));
      signs.push_back(gen() % 2 ? Sign::Plus : Sign::Minus);
      expected += static_cast<int>(signs.back()) * parts.back().mean();
    }
    EXPECT_NEAR(convolve(parts, signs).mean(), expected, 1e-9);
  }
}

TEST(Convolve, AssociativeAndCommutative) {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = random_dyadic(gen), b = random_dyadic(gen), c = random_dyadic(gen);
    const auto plus2 = [](const DiscretePMF& x, const DiscretePMF& y) {
      return convolve({x, y}, {Sign::Plus, Sign::Plus});
    };
    EXPECT_EQ(plus2(a, b), plus2(b, a));
    EXPECT_EQ(plus2(plus2(a, b), c), plus2(a, plus2(b, c)));
  }
}

TEST(Binomial, Examples) {
  EXPECT_EQ(binomial_pmf(0, 0.7), DiscretePMF::point_mass(0));
  EXPECT_EQ(binomial_pmf(3, 1.0), DiscretePMF::point_mass(3));
  EXPECT_EQ(binomial_pmf(3, 0.0), DiscretePMF::point_mass(0));
  EXPECT_EQ(binomial_pmf(2, 0.5), tri());
  EXPECT_THROW(binomial_pmf(3, 1.1), DomainError);
  EXPECT_THROW(binomial_pmf(3, -0.1), DomainError);
}

TEST(Binomial, LargeTrialsStayNormalised) {
  const auto d = binomial_pmf(5000, 0.3);
  EXPECT_NEAR(d.mean(), 1500.0, 1e-6);
  EXPECT_NEAR(d.variance(), 1050.0, 1e-5);
}

TEST(BetaBinomial, MatchesMoments) {
  // n=10, a=2, b=3: mean n a/(a+b) = 4, var n a b (a+b+n) / ((a+b)^2 (a+b+1)) = 6
  const auto d = beta_binomial_pmf(10, 2.0, 3.0);
  EXPECT_NEAR(d.mean(), 4.0, 1e-12);
  EXPECT_NEAR(d.variance(), 6.0, 1e-12);
  EXPECT_THROW(beta_binomial_pmf(10, 0.0, 1.0), DomainError);
}

TEST(Quantile, Examples) {
  EXPECT_EQ(quantile(DiscretePMF::point_mass(4), 0.5), 4);
  EXPECT_EQ(quantile(tri(), 0.5), 1);
  EXPECT_EQ(quantile(tri(), 0.9), 2);
  EXPECT_EQ(quantile(tri(), 0.25), 0);  // CDF(0) = .25 exactly
  EXPECT_THROW(quantile(tri(), 0.0), DomainError);
  EXPECT_THROW(quantile(tri(), 1.0), DomainError);
}

TEST(Quantile, DefiningInequalitiesAndMonotone) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> level(0.001, 0.999);
  for (int trial = 0; trial < 300; ++trial) {
    const auto d = random_dyadic(gen);
    double q1 = level(gen), q2 = level(gen);
    if (q1 > q2) std::swap(q1, q2);
    const auto y = quantile(d, q1);
    EXPECT_GE(d.cdf(y), q1 - kLevelTolerance);
    EXPECT_LT(d.cdf(y - 1), q1);
    EXPECT_LE(y, quantile(d, q2));
  }
}

TEST(Exceedance, Examples) {
  EXPECT_EQ(exceedance(DiscretePMF::point_mass(0), 0), 0.0);
  EXPECT_DOUBLE_EQ(exceedance(tri(), 0), 0.75);
  EXPECT_EQ(exceedance(tri(), 5), 0.0);
  EXPECT_DOUBLE_EQ(exceedance(tri(), -1), 1.0);
  EXPECT_DOUBLE_EQ(exceedance(tri(), 0.5), 0.75);
}

TEST(Exceedance, ComplementsCdfExactly) {
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 100; ++trial) {
    const auto d = random_dyadic(gen);
    for (double t = -5.5; t < 10; t += 0.5) EXPECT_EQ(d.exceedance(t) + d.cdf(t), 1.0);
  }
}

TEST(Sample, DegenerateDistribution) {
  const auto s = sample(DiscretePMF::point_mass(7), 5, Seed{123});
  EXPECT_EQ(std::vector<std::int64_t>(s.draws().begin(), s.draws().end()),
            (std::vector<std::int64_t>{7, 7, 7, 7, 7}));
  ASSERT_TRUE(s.provenance());
  EXPECT_EQ(s.provenance()->seed.value, 123u);
  EXPECT_EQ(s.provenance()->draws, 5u);
}

TEST(Sample, CoinMean) {
  EXPECT_NEAR(sample(coin(), 10'000, Seed{42}).mean(), 0.5, 0.02);
}

TEST(Sample, Deterministic) {
  EXPECT_EQ(sample(tri(), 1000, Seed{42}), sample(tri(), 1000, Seed{42}));
  EXPECT_NE(sample(tri(), 1000, Seed{42}), sample(tri(), 1000, Seed{43}));
}

TEST(Sample, IndependentOfThreadCount) {
  const std::size_t n = 3 * kChunkSize + 17;
  const auto one = sample(tri(), n, Seed{9}, 1);
  for (unsigned t : {2u, 3u, 8u}) EXPECT_EQ(sample(tri(), n, Seed{9}, t), one);
}

TEST(Sample, FrequenciesMatchPmf) {
  const DiscretePMF d({-2, 0, 3, 4}, {0.1, 0.2, 0.3, 0.4});
  const std::size_t n = 100'000;
  const auto s = sample(d, n, Seed{2024});
  const auto h = s.histogram();
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double p = d.probs()[i];
    const double f = static_cast<double>(h.at(d.support()[i])) / n;
    EXPECT_LE(std::abs(f - p), 4 * std::sqrt(p * (1 - p) / n)) << "value " << d.support()[i];
  }
}

TEST(Sample, ZeroDrawsRejected) {
  EXPECT_THROW(sample(tri(), 0, Seed{1}), DomainError);
}

TEST(EmpiricalSample, NearestRank) {
  std::vector<std::int64_t> v(100);
  std::iota(v.begin(), v.end(), 1);
  const EmpiricalSample<std::int64_t> s(v);
  EXPECT_EQ(quantile(s, 0.05), 5);
  EXPECT_EQ(quantile(s, 0.5), 50);
  EXPECT_EQ(quantile(s, 0.501), 51);
  EXPECT_DOUBLE_EQ(exceedance(s, 90), 0.10);
  EXPECT_DOUBLE_EQ(s.cdf(10), 0.10);
  EXPECT_DOUBLE_EQ(s.cdf_below(10), 0.09);
  EXPECT_THROW(EmpiricalSample<std::int64_t>({}), EmptyDataError);
}

TEST(Rng, StreamSeedsDiffer) {
  EXPECT_NE(derive_stream_seed(Seed{1}, 0).value, derive_stream_seed(Seed{1}, 1).value);
  EXPECT_NE(derive_stream_seed(Seed{1}, 0).value, derive_stream_seed(Seed{2}, 0).value);
  Xoshiro256 a(Seed{5}), b(Seed{5});
  for (int i = 0; i < 100; ++i) {
    const double u = a.uniform();
    EXPECT_EQ(u, b.uniform());
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}
