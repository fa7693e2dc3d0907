#pragma once

// Decision products derived from a predictive distribution: precautionary
// bounds, loss-optimal quantiles, change alarms, public summaries, and the
// product each kind of user needs.

#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "quotaplan/errors.hpp"
#include "quotaplan/sample.hpp"

namespace quotaplan {

/// Piecewise-linear loss: cost_under per unit the forecast falls short of
/// the outcome, cost_over per unit it exceeds it.
class LossSpec {
 public:
  LossSpec(double cost_under, double cost_over) : cost_under_(cost_under), cost_over_(cost_over) {
    if (!(cost_under > 0.0) || !std::isfinite(cost_under) || !(cost_over > 0.0) ||
        !std::isfinite(cost_over)) {
      throw DomainError("loss costs must be strictly positive and finite");
    }
  }

  double cost_under() const noexcept { return cost_under_; }
  double cost_over() const noexcept { return cost_over_; }

  /// The quantile level that minimises expected loss.
  double tau() const noexcept { return cost_under_ / (cost_under_ + cost_over_); }

  /// Loss of forecasting `point` when `outcome` occurs.
  double loss(double point, double outcome) const noexcept {
    return outcome > point ? cost_under_ * (outcome - point) : cost_over_ * (point - outcome);
  }

 private:
  double cost_under_;
  double cost_over_;
};

enum class UserType { LowStakes, GeneralAssessor, ChangeAssessor, RiskAvoider, DecisionTheorist };

inline std::string_view to_string(UserType u) {
  switch (u) {
    case UserType::LowStakes: return "LowStakes";
    case UserType::GeneralAssessor: return "GeneralAssessor";
    case UserType::ChangeAssessor: return "ChangeAssessor";
    case UserType::RiskAvoider: return "RiskAvoider";
    case UserType::DecisionTheorist: return "DecisionTheorist";
  }
  return "LowStakes";
}

inline std::optional<UserType> parse_user_type(std::string_view s) {
  for (auto u : {UserType::LowStakes, UserType::GeneralAssessor, UserType::ChangeAssessor,
                 UserType::RiskAvoider, UserType::DecisionTheorist}) {
    if (s == to_string(u)) return u;
  }
  return std::nullopt;
}

struct PointForecast {
  double value = 0.0;
};

struct IntervalForecast {
  double lo = 0.0;
  double hi = 0.0;
  double level = 0.8;
};

/// A single low (or high) quantile used as the action limit.
struct BoundForecast {
  double value = 0.0;
  double alpha = 0.05;
};

enum class AlarmStatus { InRange, Above, Below };

inline std::string_view to_string(AlarmStatus s) {
  switch (s) {
    case AlarmStatus::InRange: return "InRange";
    case AlarmStatus::Above: return "Above";
    case AlarmStatus::Below: return "Below";
  }
  return "InRange";
}

struct ChangeAlarm {
  AlarmStatus status = AlarmStatus::InRange;
  double lo = 0.0;
  double hi = 0.0;
  double observed = 0.0;
  bool alarmed() const noexcept { return status != AlarmStatus::InRange; }
};

struct OptimalPoint {
  double value = 0.0;
  double tau = 0.5;
};

using DecisionProduct =
    std::variant<PointForecast, IntervalForecast, BoundForecast, ChangeAlarm, OptimalPoint>;

/// The alpha-quantile. With "the quota must not exceed the unknown value"
/// this is the precautionary ceiling on the action.
template <PredictiveDistribution D>
typename D::value_type risk_bound(const D& dist, double alpha) {
  check_level(alpha, "alpha");
  return dist.quantile(alpha);
}

/// Minimiser of expected piecewise-linear loss: the tau-quantile, ties
/// resolved toward the smaller value.
template <PredictiveDistribution D>
OptimalPoint pinball_optimal(const D& dist, const LossSpec& loss) {
  const double tau = loss.tau();
  return {static_cast<double>(dist.quantile(tau)), tau};
}

/// Inclusive membership: observations on either endpoint are in range.
inline ChangeAlarm change_alarm(double lo, double hi, double observed) {
  if (!(lo <= hi)) throw ShapeError("change interval has lo > hi");
  ChangeAlarm alarm{AlarmStatus::InRange, lo, hi, observed};
  if (observed > hi) alarm.status = AlarmStatus::Above;
  if (observed < lo) alarm.status = AlarmStatus::Below;
  return alarm;
}

inline constexpr double kDefaultSuppression = 0.05;

struct ExceedanceEntry {
  double threshold = 0.0;
  /// Empty when the probability fell below the suppression level.
  std::optional<double> probability;
};

struct PublicSummary {
  double p10 = 0.0;
  double p50 = 0.0;
  double p90 = 0.0;
  std::vector<ExceedanceEntry> exceedances;
};

/// 10th/50th/90th percentiles and P(X > t) per threshold; probabilities
/// below `suppression` are left blank.
template <PredictiveDistribution D>
PublicSummary public_summary(const D& dist, const std::vector<double>& thresholds,
                             double suppression = kDefaultSuppression) {
  if (!(suppression >= 0.0 && suppression <= 1.0)) {
    throw DomainError("suppression level must lie in [0, 1]");
  }
  PublicSummary s;
  s.p10 = static_cast<double>(dist.quantile(0.10));
  s.p50 = static_cast<double>(dist.quantile(0.50));
  s.p90 = static_cast<double>(dist.quantile(0.90));
  for (double t : thresholds) {
    const double p = dist.exceedance(t);
    s.exceedances.push_back({t, p < suppression ? std::nullopt : std::optional<double>(p)});
  }
  return s;
}

struct ProductOptions {
  std::optional<double> alpha;
  std::optional<LossSpec> loss;
  double interval_lo = 0.10;
  double interval_hi = 0.90;
  std::optional<double> observed;
};

template <PredictiveDistribution D>
IntervalForecast central_interval(const D& dist, double lo_level, double hi_level) {
  check_level(lo_level, "interval lower level");
  check_level(hi_level, "interval upper level");
  if (!(lo_level < hi_level)) throw ShapeError("interval lower level must be below the upper level");
  return {static_cast<double>(dist.quantile(lo_level)), static_cast<double>(dist.quantile(hi_level)),
          hi_level - lo_level};
}

template <PredictiveDistribution D>
DecisionProduct product_for_user(const D& dist, UserType user, const ProductOptions& options) {
  switch (user) {
    case UserType::LowStakes:
      return PointForecast{static_cast<double>(dist.quantile(0.5))};
    case UserType::GeneralAssessor:
      return central_interval(dist, options.interval_lo, options.interval_hi);
    case UserType::ChangeAssessor: {
      if (!options.observed) throw MissingOptionError("observed");
      const auto range = central_interval(dist, options.interval_lo, options.interval_hi);
      return change_alarm(range.lo, range.hi, *options.observed);
    }
    case UserType::RiskAvoider:
      if (!options.alpha) throw MissingOptionError("alpha");
      return BoundForecast{static_cast<double>(risk_bound(dist, *options.alpha)), *options.alpha};
    case UserType::DecisionTheorist:
      if (!options.loss) throw MissingOptionError("loss");
      return pinball_optimal(dist, *options.loss);
  }
  throw DomainError("unknown user type");
}

}  // namespace quotaplan
