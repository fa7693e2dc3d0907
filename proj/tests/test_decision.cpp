#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "quotaplan/decision.hpp"

using namespace quotaplan;

namespace {

DiscretePMF uniform_pmf(std::int64_t lo, std::int64_t hi) {
  std::vector<std::int64_t> s;
  for (auto v = lo; v <= hi; ++v) s.push_back(v);
  return DiscretePMF(s, std::vector<double>(s.size(), 1.0 / static_cast<double>(s.size())));
}

DiscretePMF random_pmf(std::mt19937_64& gen) {
  std::uniform_int_distribution<int> npoints(1, 8), start(-10, 10), gap(1, 4);
  std::uniform_real_distribution<double> weight(0.01, 1.0);
  const int n = npoints(gen);
  std::vector<std::int64_t> s;
  std::vector<double> w;
  std::int64_t v = start(gen);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    s.push_back(v);
    v += gap(gen);
    w.push_back(weight(gen));
    total += w.back();
  }
  for (auto& x : w) x /= total;
  // Re-normalise the last entry so the sum is within the tolerance.
  w.back() = 1.0 - std::accumulate(w.begin(), w.end() - 1, 0.0);
  return DiscretePMF(s, w);
}

// Argmin of expected loss over the support, ties to the smaller value.
double brute_force_optimum(const DiscretePMF& d, const LossSpec& loss) {
  double best = 0.0, best_loss = std::numeric_limits<double>::infinity();
  for (auto point : d.support()) {
    double e = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      e += d.probs()[i] * loss.loss(static_cast<double>(point), static_cast<double>(d.support()[i]));
    }
    if (e < best_loss - 1e-12) {
      best_loss = e;
      best = static_cast<double>(point);
    }
  }
  return best;
}

}  // namespace

TEST(RiskBound, Examples) {
  EXPECT_EQ(risk_bound(DiscretePMF::point_mass(100), 0.05), 100);
  EXPECT_EQ(risk_bound(uniform_pmf(90, 109), 0.05), 90);
  std::vector<std::int64_t> v(100);
  std::iota(v.begin(), v.end(), 1);
  EXPECT_EQ(risk_bound(EmpiricalSample<std::int64_t>(v), 0.05), 5);
  EXPECT_THROW(risk_bound(uniform_pmf(0, 9), 0.0), DomainError);
  EXPECT_THROW(risk_bound(uniform_pmf(0, 9), 1.0), DomainError);
}

TEST(RiskBound, BelowMedian) {
  std::mt19937_64 gen(1);
  for (int i = 0; i < 200; ++i) {
    const auto d = random_pmf(gen);
    for (double a : {0.01, 0.05, 0.25, 0.5}) EXPECT_LE(risk_bound(d, a), d.quantile(0.5));
  }
}

TEST(LossSpec, Validation) {
  EXPECT_THROW(LossSpec(0.0, 1.0), DomainError);
  EXPECT_THROW(LossSpec(1.0, -1.0), DomainError);
  EXPECT_THROW(LossSpec(1.0, std::numeric_limits<double>::infinity()), DomainError);
  EXPECT_DOUBLE_EQ(LossSpec(1.0, 19.0).tau(), 0.05);
  EXPECT_DOUBLE_EQ(LossSpec(3.0, 3.0).tau(), 0.5);
}

TEST(PinballOptimal, EqualCostsGiveMedian) {
  EXPECT_EQ(pinball_optimal(uniform_pmf(0, 9), LossSpec(2.0, 2.0)).value, 4.0);
}

TEST(PinballOptimal, PrecautionaryCase) {
  const auto d = uniform_pmf(90, 109);
  const LossSpec loss(1.0, 19.0);
  const auto opt = pinball_optimal(d, loss);
  EXPECT_DOUBLE_EQ(opt.tau, 0.05);
  EXPECT_EQ(opt.value, 90.0);
  EXPECT_EQ(opt.value, brute_force_optimum(d, loss));
  EXPECT_EQ(opt.value, static_cast<double>(risk_bound(d, 0.05)));
}

TEST(PinballOptimal, PointMass) {
  for (double over : {0.1, 1.0, 50.0}) {
    EXPECT_EQ(pinball_optimal(DiscretePMF::point_mass(-3), LossSpec(1.0, over)).value, -3.0);
  }
}

TEST(PinballOptimal, MatchesBruteForce) {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> cost(0.05, 20.0);
  for (int i = 0; i < 500; ++i) {
    const auto d = random_pmf(gen);
    const LossSpec loss(cost(gen), cost(gen));
    EXPECT_EQ(pinball_optimal(d, loss).value, brute_force_optimum(d, loss)) << "case " << i;
  }
}

TEST(PinballOptimal, TauMonotone) {
  std::mt19937_64 gen(9);
  for (int i = 0; i < 100; ++i) {
    const auto d = random_pmf(gen);
    double prev = std::numeric_limits<double>::infinity();
    for (double over = 0.1; over < 40.0; over *= 1.5) {
      const double v = pinball_optimal(d, LossSpec(1.0, over)).value;
      EXPECT_LE(v, prev);
      prev = v;
    }
  }
}

TEST(ChangeAlarm, Examples) {
  EXPECT_EQ(change_alarm(2, 8, 5).status, AlarmStatus::InRange);
  EXPECT_EQ(change_alarm(2, 8, 9).status, AlarmStatus::Above);
  EXPECT_EQ(change_alarm(2, 8, 8).status, AlarmStatus::InRange);
  EXPECT_EQ(change_alarm(2, 8, 2).status, AlarmStatus::InRange);
  EXPECT_EQ(change_alarm(2, 8, 1.5).status, AlarmStatus::Below);
  EXPECT_EQ(change_alarm(3, 3, 3).status, AlarmStatus::InRange);
  EXPECT_THROW(change_alarm(8, 2, 5), ShapeError);
}

TEST(ChangeAlarm, ExhaustiveAndExclusive) {
  for (double obs = -1.0; obs <= 11.0; obs += 0.25) {
    const auto a = change_alarm(2, 8, obs);
    const int flags = (a.status == AlarmStatus::InRange) + (a.status == AlarmStatus::Above) +
                      (a.status == AlarmStatus::Below);
    EXPECT_EQ(flags, 1);
    EXPECT_EQ(a.alarmed(), obs < 2 || obs > 8);
  }
}

TEST(PublicSummary, PointMassSuppressed) {
  const auto s = public_summary(DiscretePMF::point_mass(0), {0.01});
  ASSERT_EQ(s.exceedances.size(), 1u);
  EXPECT_FALSE(s.exceedances[0].probability);
  EXPECT_EQ(s.p10, 0.0);
  EXPECT_EQ(s.p90, 0.0);
}

TEST(PublicSummary, UniformReported) {
  const auto s = public_summary(uniform_pmf(0, 9), {4.5}, 0.05);
  ASSERT_TRUE(s.exceedances[0].probability);
  EXPECT_DOUBLE_EQ(*s.exceedances[0].probability, 0.5);
  EXPECT_EQ(s.p10, 0.0);
  EXPECT_EQ(s.p50, 4.0);
  EXPECT_EQ(s.p90, 8.0);
}

TEST(PublicSummary, PrecipitationThresholds) {
  // 40 dry days, then 0.1" x 30, 0.5" x 20, 1.2" x 8, 2.0" x 2.
  std::vector<double> rain(40, 0.0);
  rain.insert(rain.end(), 30, 0.1);
  rain.insert(rain.end(), 20, 0.5);
  rain.insert(rain.end(), 8, 1.2);
  rain.insert(rain.end(), 2, 2.0);
  const EmpiricalSample<double> sample(rain);
  const auto s = public_summary(sample, {0.01, 0.25, 1.0});
  ASSERT_EQ(s.exceedances.size(), 3u);
  EXPECT_DOUBLE_EQ(*s.exceedances[0].probability, 0.6);
  EXPECT_DOUBLE_EQ(*s.exceedances[1].probability, 0.3);
  EXPECT_DOUBLE_EQ(*s.exceedances[2].probability, 0.1);
  EXPECT_EQ(s.p10, 0.0);
  EXPECT_EQ(s.p50, 0.1);
  EXPECT_EQ(s.p90, 0.5);  // 90th order statistic
}

TEST(PublicSummary, SuppressionRecoverable) {
  std::mt19937_64 gen(4);
  for (int i = 0; i < 50; ++i) {
    const auto d = random_pmf(gen);
    const std::vector<double> thresholds{-5, -1, 0, 1, 3, 7, 12};
    const auto shown = public_summary(d, thresholds, 0.05);
    const auto all = public_summary(d, thresholds, 0.0);
    for (std::size_t k = 0; k < thresholds.size(); ++k) {
      ASSERT_TRUE(all.exceedances[k].probability);
      EXPECT_EQ(*all.exceedances[k].probability, d.exceedance(thresholds[k]));
      if (shown.exceedances[k].probability) {
        EXPECT_GE(*shown.exceedances[k].probability, 0.05);
      } else {
        EXPECT_LT(*all.exceedances[k].probability, 0.05);
      }
    }
    EXPECT_LE(shown.p10, shown.p50);
    EXPECT_LE(shown.p50, shown.p90);
  }
  EXPECT_THROW(public_summary(uniform_pmf(0, 3), {1.0}, 1.5), DomainError);
}

TEST(ProductForUser, Dispatch) {
  const auto d = uniform_pmf(0, 9);
  ProductOptions none;
  EXPECT_EQ(std::get<PointForecast>(product_for_user(d, UserType::LowStakes, none)).value, 4.0);

  const auto iv = std::get<IntervalForecast>(product_for_user(d, UserType::GeneralAssessor, none));
  EXPECT_EQ(iv.lo, 0.0);
  EXPECT_EQ(iv.hi, 8.0);
  EXPECT_DOUBLE_EQ(iv.level, 0.8);

  ProductOptions observed;
  observed.observed = 9.0;
  const auto alarm = std::get<ChangeAlarm>(product_for_user(d, UserType::ChangeAssessor, observed));
  EXPECT_EQ(alarm.status, AlarmStatus::Above);

  ProductOptions alpha;
  alpha.alpha = 0.2;
  const auto bound = std::get<BoundForecast>(product_for_user(d, UserType::RiskAvoider, alpha));
  EXPECT_EQ(bound.value, 1.0);
  EXPECT_EQ(bound.alpha, 0.2);

  ProductOptions loss;
  loss.loss = LossSpec(1.0, 1.0);
  EXPECT_EQ(std::get<OptimalPoint>(product_for_user(d, UserType::DecisionTheorist, loss)).value, 4.0);
}

TEST(ProductForUser, MissingOptionsNamed) {
  const auto d = uniform_pmf(0, 9);
  const ProductOptions none;
  try {
    product_for_user(d, UserType::RiskAvoider, none);
    FAIL();
  } catch (const MissingOptionError& e) {
    EXPECT_EQ(e.option(), "alpha");
  }
  EXPECT_THROW(product_for_user(d, UserType::DecisionTheorist, none), MissingOptionError);
  EXPECT_THROW(product_for_user(d, UserType::ChangeAssessor, none), MissingOptionError);
}

TEST(UserType, ParseRoundTrip) {
  for (auto u : {UserType::LowStakes, UserType::GeneralAssessor, UserType::ChangeAssessor, UserType::RiskAvoider,
                 UserType::DecisionTheorist}) {
    EXPECT_EQ(parse_user_type(to_string(u)), u);
  }
  EXPECT_FALSE(parse_user_type("Gambler"));
}
