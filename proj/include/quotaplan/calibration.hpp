#pragma once

// Forecast verification: central-interval coverage, randomized PIT
// histograms, binned reliability of event probabilities, and sharpness.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "quotaplan/errors.hpp"
#include "quotaplan/pmf.hpp"
#include "quotaplan/rng.hpp"
#include "quotaplan/sample.hpp"

namespace quotaplan {

using Forecast = std::variant<DiscretePMF, EmpiricalSample<double>>;

/// Forecast probability that the outcome exceeds `threshold`.
struct EventForecast {
  double threshold = 0.0;
  double probability = 0.0;
};

struct ForecastRecord {
  Forecast forecast;
  double observed = 0.0;
  std::vector<EventForecast> events;
};

namespace detail {

inline void require_records(std::span<const ForecastRecord> records) {
  if (records.empty()) throw EmptyDataError("no forecast records");
}

inline void check_level_pair(double lo, double hi) {
  if (!(lo > 0.0 && lo < hi && hi < 1.0)) {
    throw DomainError("interval levels must satisfy 0 < lo < hi < 1");
  }
}

template <typename F>
auto visit_forecast(const Forecast& f, F&& fn) {
  return std::visit(std::forward<F>(fn), f);
}

inline std::pair<double, double> record_interval(const ForecastRecord& r, double lo, double hi) {
  return visit_forecast(r.forecast, [&](const auto& d) {
    return std::pair<double, double>{static_cast<double>(d.quantile(lo)),
                                     static_cast<double>(d.quantile(hi))};
  });
}

}  // namespace detail

/// Fraction of records with q_lo <= observed <= q_hi.
inline double interval_coverage(std::span<const ForecastRecord> records, double lo, double hi) {
  detail::require_records(records);
  detail::check_level_pair(lo, hi);
  std::size_t inside = 0;
  for (const auto& r : records) {
    const auto [a, b] = detail::record_interval(r, lo, hi);
    if (a <= r.observed && r.observed <= b) ++inside;
  }
  return static_cast<double>(inside) / static_cast<double>(records.size());
}

/// Coverage a calibrated forecaster would attain: the mean over records of
/// P(q_lo <= X <= q_hi) under each record's own forecast. Nearest-rank
/// intervals on discrete forecasts cover at least the nominal hi - lo.
inline double attainable_coverage(std::span<const ForecastRecord> records, double lo, double hi) {
  detail::require_records(records);
  detail::check_level_pair(lo, hi);
  double total = 0.0;
  for (const auto& r : records) {
    const auto [a, b] = detail::record_interval(r, lo, hi);
    total += detail::visit_forecast(r.forecast, [&](const auto& d) { return d.cdf(b) - d.cdf_below(a); });
  }
  return total / static_cast<double>(records.size());
}

/// Mean width q_hi - q_lo.
inline double sharpness(std::span<const ForecastRecord> records, double lo, double hi) {
  detail::require_records(records);
  detail::check_level_pair(lo, hi);
  double total = 0.0;
  for (const auto& r : records) {
    const auto [a, b] = detail::record_interval(r, lo, hi);
    total += b - a;
  }
  return total / static_cast<double>(records.size());
}

enum class PitTieRule { Randomized, Midpoint };

/// PIT value of one record. Randomized: uniform on (P(X < obs), P(X <= obs)].
inline double pit_value(const ForecastRecord& record, PitTieRule rule, Xoshiro256& rng) {
  const auto [below, at] = detail::visit_forecast(record.forecast, [&](const auto& d) {
    return std::pair<double, double>{d.cdf_below(record.observed), d.cdf(record.observed)};
  });
  if (rule == PitTieRule::Midpoint) return 0.5 * (below + at);
  return below + rng.uniform_open_closed() * (at - below);
}

/// Histogram of PIT values over `bins` equal bins of [0, 1]; u = 1 falls in
/// the last bin. Record i draws from derive_stream_seed(seed, i), so the
/// output does not depend on how records are partitioned.
inline std::vector<std::size_t> pit_ranks(std::span<const ForecastRecord> records, std::size_t bins,
                                          Seed seed, PitTieRule rule = PitTieRule::Randomized) {
  detail::require_records(records);
  if (bins == 0) throw DomainError("PIT histogram needs at least one bin");
  std::vector<std::size_t> counts(bins, 0);
  for (std::size_t i = 0; i < records.size(); ++i) {
    Xoshiro256 rng(derive_stream_seed(seed, i));
    const double u = pit_value(records[i], rule, rng);
    auto bin = static_cast<std::size_t>(std::floor(u * static_cast<double>(bins)));
    ++counts[std::min(bin, bins - 1)];
  }
  return counts;
}

/// Pearson chi-square of a histogram against the flat histogram.
inline double uniformity_chi_square(std::span<const std::size_t> counts) {
  double n = 0.0;
  for (auto c : counts) n += static_cast<double>(c);
  const double expected = n / static_cast<double>(counts.size());
  double chi2 = 0.0;
  for (auto c : counts) {
    const double d = static_cast<double>(c) - expected;
    chi2 += d * d / expected;
  }
  return chi2;
}

struct EventOutcome {
  double probability = 0.0;
  bool occurred = false;
};

struct ReliabilityBin {
  double lo = 0.0;
  double hi = 0.0;
  double center = 0.0;
  std::size_t count = 0;
  // Empty for bins with no entries.
  std::optional<double> mean_probability;
  std::optional<double> observed_frequency;
};

/// n equal-width edges over [0, 1].
inline std::vector<double> uniform_edges(std::size_t bins) {
  if (bins == 0) throw DomainError("reliability table needs at least one bin");
  std::vector<double> edges(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) {
    edges[i] = static_cast<double>(i) / static_cast<double>(bins);
  }
  return edges;
}

/// Bins [e0, e1), [e1, e2), ..., [e_{k-1}, e_k]; edges must run from 0 to 1.
inline std::vector<ReliabilityBin> reliability(std::span<const EventOutcome> entries,
                                               std::span<const double> edges) {
  if (entries.empty()) throw EmptyDataError("no event forecasts for the reliability table");
  if (edges.size() < 2 || edges.front() != 0.0 || edges.back() != 1.0) {
    throw ShapeError("reliability edges must start at 0 and end at 1");
  }
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (!(edges[i] > edges[i - 1])) throw ShapeError("reliability edges must be strictly increasing");
  }
  const std::size_t bins = edges.size() - 1;
  std::vector<double> prob_sum(bins, 0.0);
  std::vector<std::size_t> hits(bins, 0);
  std::vector<ReliabilityBin> table(bins);
  for (const auto& e : entries) {
    if (!(e.probability >= 0.0 && e.probability <= 1.0)) {
      throw DomainError("event probability must lie in [0, 1]");
    }
    auto it = std::upper_bound(edges.begin(), edges.end(), e.probability);
    std::size_t bin = static_cast<std::size_t>(it - edges.begin()) - 1;
    bin = std::min(bin, bins - 1);
    ++table[bin].count;
    prob_sum[bin] += e.probability;
    if (e.occurred) ++hits[bin];
  }
  for (std::size_t b = 0; b < bins; ++b) {
    auto& row = table[b];
    row.lo = edges[b];
    row.hi = edges[b + 1];
    row.center = 0.5 * (row.lo + row.hi);
    if (row.count > 0) {
      const double n = static_cast<double>(row.count);
      row.mean_probability = prob_sum[b] / n;
      row.observed_frequency = static_cast<double>(hits[b]) / n;
    }
  }
  return table;
}

/// Event entries carried by the records: outcome is observed > threshold.
inline std::vector<EventOutcome> recorded_events(std::span<const ForecastRecord> records) {
  std::vector<EventOutcome> out;
  for (const auto& r : records) {
    for (const auto& e : r.events) out.push_back({e.probability, r.observed > e.threshold});
  }
  return out;
}

/// Event entries computed from each forecast at the given thresholds.
inline std::vector<EventOutcome> derived_events(std::span<const ForecastRecord> records,
                                                std::span<const double> thresholds) {
  std::vector<EventOutcome> out;
  out.reserve(records.size() * thresholds.size());
  for (const auto& r : records) {
    for (double t : thresholds) {
      const double p = detail::visit_forecast(r.forecast, [t](const auto& d) { return d.exceedance(t); });
      out.push_back({p, r.observed > t});
    }
  }
  return out;
}

struct LevelPair {
  double lo = 0.1;
  double hi = 0.9;
};

struct CoverageEntry {
  LevelPair levels;
  double nominal = 0.0;
  double attainable = 0.0;
  double empirical = 0.0;
  double mean_width = 0.0;
};

struct CalibrationOptions {
  std::vector<LevelPair> levels{{0.1, 0.9}};
  std::size_t pit_bins = 10;
  std::size_t reliability_bins = 10;
  std::vector<double> event_thresholds;
  Seed seed{0};
  PitTieRule tie_rule = PitTieRule::Randomized;
};

struct CalibrationReport {
  std::size_t n_records = 0;
  std::vector<CoverageEntry> coverage;
  std::vector<std::size_t> pit_counts;
  double pit_chi_square = 0.0;
  std::vector<ReliabilityBin> reliability;  // empty when there are no event entries
  std::size_t n_events = 0;
};

inline CalibrationReport calibrate(std::span<const ForecastRecord> records,
                                   const CalibrationOptions& options) {
  detail::require_records(records);
  CalibrationReport report;
  report.n_records = records.size();
  for (const auto& lv : options.levels) {
    report.coverage.push_back({lv, lv.hi - lv.lo, attainable_coverage(records, lv.lo, lv.hi),
                               interval_coverage(records, lv.lo, lv.hi),
                               sharpness(records, lv.lo, lv.hi)});
  }
  report.pit_counts = pit_ranks(records, options.pit_bins, options.seed, options.tie_rule);
  report.pit_chi_square = uniformity_chi_square(report.pit_counts);
  auto events = recorded_events(records);
  auto derived = derived_events(records, options.event_thresholds);
  events.insert(events.end(), derived.begin(), derived.end());
  report.n_events = events.size();
  if (!events.empty()) {
    const auto edges = uniform_edges(options.reliability_bins);
    report.reliability = reliability(events, edges);
  }
  return report;
}

}  // namespace quotaplan
