#pragma once

// Lost teaching-assistant positions as a function of the number of offers.
//
//   Y = T + R1 + R2 + G + L + D - C - A,   A | O ~ acceptance process
//
// T and C are known; R1 (internal research assistantships), R2 (external
// research assistantships), G (graduations) and L (dropouts) are independent
// discrete distributions. D is an optional known adjustment, zero unless the
// model file sets it. Negative Y counts accepted students with no funding
// from current sources.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <future>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "quotaplan/errors.hpp"
#include "quotaplan/pmf.hpp"
#include "quotaplan/rng.hpp"
#include "quotaplan/sample.hpp"

namespace quotaplan {

/// One admissions year: offers made and offers accepted.
struct Cohort {
  std::int64_t offers = 0;
  std::int64_t acceptances = 0;
  friend bool operator==(const Cohort&, const Cohort&) = default;
};

/// Pooled maximum-likelihood acceptance probability.
inline double acceptance_rate(std::span<const Cohort> history) {
  if (history.empty()) throw EmptyDataError("acceptance history is empty");
  std::int64_t offers = 0;
  std::int64_t accepted = 0;
  for (std::size_t i = 0; i < history.size(); ++i) {
    const auto& c = history[i];
    if (c.offers < 0 || c.acceptances < 0) {
      throw DataError("acceptance history entry " + std::to_string(i) + " has a negative count");
    }
    if (c.acceptances > c.offers) {
      throw DataError("acceptance history entry " + std::to_string(i) + ": " +
                      std::to_string(c.acceptances) + " acceptances exceed " +
                      std::to_string(c.offers) + " offers");
    }
    offers += c.offers;
    accepted += c.acceptances;
  }
  if (offers == 0) throw EmptyDataError("acceptance history has zero total offers");
  return static_cast<double>(accepted) / static_cast<double>(offers);
}

enum class AcceptanceProvenance { Fixed, PooledEstimate, BetaPosterior };

inline std::string_view to_string(AcceptanceProvenance p) {
  switch (p) {
    case AcceptanceProvenance::Fixed: return "fixed";
    case AcceptanceProvenance::PooledEstimate: return "pooled-estimate";
    case AcceptanceProvenance::BetaPosterior: return "beta-posterior";
  }
  return "fixed";
}

struct BetaParams {
  double alpha = 1.0;
  double beta = 1.0;
  friend bool operator==(const BetaParams&, const BetaParams&) = default;
};

/// Distribution of acceptances given O offers. Every offer is accepted
/// independently with a common probability; with a Beta posterior the count
/// is beta-binomial instead of binomial.
class AcceptanceModel {
 public:
  static AcceptanceModel fixed(double pi) { return AcceptanceModel(pi, AcceptanceProvenance::Fixed, {}); }

  /// A pooled estimate computed earlier (e.g. read back from a saved model).
  static AcceptanceModel estimate(double pi) {
    return AcceptanceModel(pi, AcceptanceProvenance::PooledEstimate, {});
  }

  static AcceptanceModel pooled(std::span<const Cohort> history) {
    return AcceptanceModel(acceptance_rate(history), AcceptanceProvenance::PooledEstimate, {});
  }

  /// Posterior predictive under a Beta(prior) on pi updated with the history.
  static AcceptanceModel beta_posterior(std::span<const Cohort> history, BetaParams prior) {
    acceptance_rate(history);  // validates the history
    double offers = 0.0;
    double accepted = 0.0;
    for (const auto& c : history) {
      offers += static_cast<double>(c.offers);
      accepted += static_cast<double>(c.acceptances);
    }
    return beta(BetaParams{prior.alpha + accepted, prior.beta + offers - accepted});
  }

  static AcceptanceModel beta(BetaParams posterior) {
    if (!(posterior.alpha > 0.0 && posterior.beta > 0.0) || !std::isfinite(posterior.alpha) ||
        !std::isfinite(posterior.beta)) {
      throw DomainError("beta parameters must be positive and finite");
    }
    return AcceptanceModel(posterior.alpha / (posterior.alpha + posterior.beta),
                           AcceptanceProvenance::BetaPosterior, posterior);
  }

  /// Mean acceptance probability.
  double pi() const noexcept { return pi_; }
  AcceptanceProvenance provenance() const noexcept { return provenance_; }
  const std::optional<BetaParams>& beta_params() const noexcept { return beta_; }

  DiscretePMF distribution(std::int64_t offers) const {
    if (offers < 0) throw DomainError("number of offers must be non-negative");
    if (beta_) return beta_binomial_pmf(offers, beta_->alpha, beta_->beta);
    return binomial_pmf(offers, pi_);
  }

  friend bool operator==(const AcceptanceModel&, const AcceptanceModel&) = default;

 private:
  AcceptanceModel(double pi, AcceptanceProvenance provenance, std::optional<BetaParams> beta)
      : pi_(pi), provenance_(provenance), beta_(beta) {
    if (!(pi >= 0.0 && pi <= 1.0)) throw DomainError("acceptance probability must lie in [0, 1]");
  }

  double pi_;
  AcceptanceProvenance provenance_;
  std::optional<BetaParams> beta_;
};

struct PlanningModel {
  PointMass ta_positions;      // T
  PointMass current_students;  // C
  DiscretePMF ra_internal;     // R1
  DiscretePMF ra_external;     // R2
  DiscretePMF graduating;      // G
  DiscretePMF leaving;         // L
  AcceptanceModel acceptance;
  PointMass adjustment{0};     // D

  void validate() const {
    if (ta_positions.value < 0) throw ValidationError("ta_positions must be non-negative");
    if (current_students.value < 0) throw ValidationError("current_students must be non-negative");
    auto non_negative = [](const DiscretePMF& d, const char* name) {
      if (d.min() < 0) throw ValidationError(std::string(name) + " has negative support");
    };
    non_negative(ra_internal, "ra_internal");
    non_negative(ra_external, "ra_external");
    non_negative(graduating, "graduating");
    non_negative(leaving, "leaving");
  }

  /// T + D - C.
  std::int64_t known_balance() const noexcept {
    return ta_positions.value + adjustment.value - current_students.value;
  }

  /// Distribution of Y + A, i.e. everything except the acceptances.
  DiscretePMF positions_before_acceptances() const {
    const std::array<DiscretePMF, 5> parts{DiscretePMF::point_mass(known_balance()), ra_internal,
                                           ra_external, graduating, leaving};
    const std::array<Sign, 5> signs{Sign::Plus, Sign::Plus, Sign::Plus, Sign::Plus, Sign::Plus};
    return convolve(parts, signs);
  }

  /// E[Y | O] from the component means.
  double expected_lost(std::int64_t offers) const noexcept {
    return static_cast<double>(known_balance()) + ra_internal.mean() + ra_external.mean() +
           graduating.mean() + leaving.mean() - static_cast<double>(offers) * acceptance.pi();
  }

  friend bool operator==(const PlanningModel&, const PlanningModel&) = default;
};

struct OfferScenario {
  std::int64_t offers = 0;
};

enum class EngineKind { Exact, MonteCarlo };

inline std::string_view to_string(EngineKind k) {
  return k == EngineKind::Exact ? "exact" : "mc";
}

/// What produced a forecast.
struct EngineInfo {
  EngineKind kind = EngineKind::Exact;
  std::size_t draws = 0;
  std::optional<Seed> seed;
  friend bool operator==(const EngineInfo&, const EngineInfo&) = default;
};

struct LostPositionsForecast {
  std::int64_t offers = 0;
  std::variant<DiscretePMF, EmpiricalSample<std::int64_t>> distribution;
  EngineInfo engine;

  std::int64_t quantile(double q) const {
    return std::visit([q](const auto& d) { return quantity(d, q); }, distribution);
  }

  /// P(Y <= 0): no teaching positions lost.
  double p_nonpositive() const {
    return std::visit([](const auto& d) { return d.cdf(0.0); }, distribution);
  }

  double mean() const {
    return std::visit([](const auto& d) { return d.mean(); }, distribution);
  }

 private:
  template <typename D>
  static std::int64_t quantity(const D& d, double q) {
    return ::quotaplan::quantile(d, q);
  }
};

namespace detail {

inline void check_offers(std::int64_t offers) {
  if (offers < 0) throw DomainError("number of offers must be non-negative");
}

}  // namespace detail

inline LostPositionsForecast lost_positions_exact(const PlanningModel& model, OfferScenario scenario) {
  detail::check_offers(scenario.offers);
  const DiscretePMF base = model.positions_before_acceptances();
  const std::array<DiscretePMF, 2> parts{base, model.acceptance.distribution(scenario.offers)};
  const std::array<Sign, 2> signs{Sign::Plus, Sign::Minus};
  return {scenario.offers, convolve(parts, signs), EngineInfo{EngineKind::Exact, 0, std::nullopt}};
}

/// Simulates Y draw by draw. Each draw consumes five uniforms from the chunk's
/// stream, in the order R1, R2, G, L, A; A is drawn by inverse CDF, so runs
/// sharing a seed use common random numbers across offer counts.
inline LostPositionsForecast lost_positions_mc(const PlanningModel& model, OfferScenario scenario,
                                               std::size_t draws, Seed seed, unsigned threads = 0) {
  detail::check_offers(scenario.offers);
  if (draws == 0) throw DomainError("Monte Carlo draw count must be at least 1");
  const DiscretePMF acceptances = model.acceptance.distribution(scenario.offers);
  const std::int64_t balance = model.known_balance();
  const std::array<const DiscretePMF*, 4> parts{&model.ra_internal, &model.ra_external,
                                                &model.graduating, &model.leaving};
  std::vector<std::int64_t> ys(draws);
  for_each_chunk(draws, threads, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
    Xoshiro256 rng(derive_stream_seed(seed, chunk));
    for (std::size_t i = begin; i < end; ++i) {
      std::int64_t y = balance;
      for (const DiscretePMF* part : parts) {
        y += part->support()[part->inverse_cdf_index(rng.uniform())];
      }
      y -= acceptances.support()[acceptances.inverse_cdf_index(rng.uniform())];
      ys[i] = y;
    }
  });
  return {scenario.offers,
          EmpiricalSample<std::int64_t>(std::move(ys), SampleProvenance{seed, draws}),
          EngineInfo{EngineKind::MonteCarlo, draws, seed}};
}

enum class Stance { VeryConservative, Conservative, BreakEven, Bold, VeryBold };

/// Description-column wording.
inline std::string_view to_string(Stance s) {
  switch (s) {
    case Stance::VeryConservative: return "Very conservative";
    case Stance::Conservative: return "Conservative";
    case Stance::BreakEven: return "Break-even";
    case Stance::Bold: return "Bold";
    case Stance::VeryBold: return "Very bold";
  }
  return "Break-even";
}

/// Band edges sit midway between the reported levels .10/.33/.50/.67/.90.
inline Stance stance_label(double p_nonpositive) {
  if (!(p_nonpositive >= 0.0 && p_nonpositive <= 1.0)) {
    throw DomainError("stance probability must lie in [0, 1]");
  }
  if (p_nonpositive < 0.215) return Stance::VeryConservative;
  if (p_nonpositive < 0.415) return Stance::Conservative;
  if (p_nonpositive <= 0.585) return Stance::BreakEven;
  if (p_nonpositive <= 0.785) return Stance::Bold;
  return Stance::VeryBold;
}

inline constexpr std::array<double, 5> kScanLevels{0.10, 0.33, 0.50, 0.67, 0.90};

struct ScanRow {
  std::int64_t offers = 0;
  std::array<std::int64_t, kScanLevels.size()> percentiles{};
  double p_nonpositive = 0.0;
  Stance label = Stance::BreakEven;
  EngineInfo engine;
};

enum class EngineChoice { Exact, MonteCarlo, Auto };

struct EngineOptions {
  EngineChoice choice = EngineChoice::Auto;
  std::size_t draws = 100'000;
  std::optional<Seed> seed;
  unsigned threads = 0;
};

/// Resolves Auto: exact unless the Y support would exceed the cap.
inline EngineKind resolve_engine(const PlanningModel& model, std::int64_t offers,
                                 const EngineOptions& options) {
  switch (options.choice) {
    case EngineChoice::Exact: return EngineKind::Exact;
    case EngineChoice::MonteCarlo: return EngineKind::MonteCarlo;
    case EngineChoice::Auto: break;
  }
  const std::array<DiscretePMF, 4> parts{model.ra_internal, model.ra_external, model.graduating,
                                         model.leaving};
  const std::int64_t width = predicted_support_width(parts) + offers;
  return width < kMaxSupportPoints ? EngineKind::Exact : EngineKind::MonteCarlo;
}

inline LostPositionsForecast lost_positions(const PlanningModel& model, OfferScenario scenario,
                                            const EngineOptions& options) {
  if (resolve_engine(model, scenario.offers, options) == EngineKind::Exact) {
    return lost_positions_exact(model, scenario);
  }
  if (!options.seed) throw MissingOptionError("seed");
  return lost_positions_mc(model, scenario, options.draws, *options.seed, options.threads);
}

inline ScanRow scan_row(const LostPositionsForecast& forecast) {
  ScanRow row;
  row.offers = forecast.offers;
  for (std::size_t i = 0; i < kScanLevels.size(); ++i) {
    row.percentiles[i] = forecast.quantile(kScanLevels[i]);
  }
  row.p_nonpositive = forecast.p_nonpositive();
  row.label = stance_label(row.p_nonpositive);
  row.engine = forecast.engine;
  return row;
}

/// One row per offer count, in the order given. Offer counts are evaluated
/// concurrently; every Monte Carlo row uses the same seed.
inline std::vector<ScanRow> scan(const PlanningModel& model, std::span<const std::int64_t> offer_counts,
                                 const EngineOptions& options) {
  if (offer_counts.empty()) throw ShapeError("scan needs at least one offer count");
  for (auto o : offer_counts) detail::check_offers(o);
  for (auto o : offer_counts) {
    if (resolve_engine(model, o, options) == EngineKind::MonteCarlo && !options.seed) {
      throw MissingOptionError("seed");
    }
  }
  // Inner sampling runs single-threaded when rows already run in parallel.
  EngineOptions inner = options;
  if (offer_counts.size() > 1) inner.threads = 1;
  std::vector<std::future<ScanRow>> pending;
  pending.reserve(offer_counts.size());
  for (auto o : offer_counts) {
    pending.push_back(std::async(std::launch::async, [&model, &inner, o] {
      return scan_row(lost_positions(model, OfferScenario{o}, inner));
    }));
  }
  std::vector<ScanRow> rows;
  rows.reserve(pending.size());
  for (auto& f : pending) rows.push_back(f.get());
  return rows;
}

struct OfferRange {
  std::int64_t min = 0;
  std::int64_t max = 0;
};

struct BreakEven {
  std::int64_t offers = 0;
  double p_nonpositive = 0.0;
};

/// Smallest O in range with P(Y <= 0 | O) >= 1/2, from the exact engine.
/// std::nullopt when no offer count in the range qualifies.
inline std::optional<BreakEven> break_even(const PlanningModel& model, OfferRange range) {
  if (range.min < 0 || range.max < range.min) {
    throw DomainError("break-even search range must satisfy 0 <= min <= max");
  }
  const DiscretePMF base = model.positions_before_acceptances();
  for (std::int64_t o = range.min; o <= range.max; ++o) {
    const std::array<DiscretePMF, 2> parts{base, model.acceptance.distribution(o)};
    const std::array<Sign, 2> signs{Sign::Plus, Sign::Minus};
    const double p = convolve(parts, signs).cdf(0.0);
    if (p >= 0.5 - kLevelTolerance) return BreakEven{o, p};
  }
  return std::nullopt;
}

}  // namespace quotaplan
