#pragma once

// Exact probability mass functions over integer support.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "quotaplan/errors.hpp"

namespace quotaplan {

/// Construction tolerance on the total probability mass.
inline constexpr double kNormalizationTolerance = 1e-9;

/// Slack used when comparing an accumulated CDF against a target level, so
/// that round-off in a sum such as 0.1 + 0.1 + ... does not move a quantile.
inline constexpr double kLevelTolerance = 1e-12;

/// Largest support (max - min + 1) a convolution may produce.
inline constexpr std::int64_t kMaxSupportPoints = 1'000'000;

class DiscretePMF {
 public:
  using value_type = std::int64_t;

  /// Entries with probability exactly zero are dropped; everything else is
  /// validated and stored as given (no renormalisation).
  DiscretePMF(std::vector<value_type> support, std::vector<double> probs) {
    if (support.size() != probs.size()) {
      throw ShapeError("pmf support and probability lists differ in length");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < support.size(); ++i) {
      const double p = probs[i];
      if (!std::isfinite(p) || p < 0.0) {
        throw ValidationError("pmf probability at value " + std::to_string(support[i]) +
                              " is negative or not finite");
      }
      if (i > 0 && support[i] <= support[i - 1]) {
        throw ValidationError("pmf support must be strictly increasing");
      }
      total += p;
      if (p > 0.0) {
        support_.push_back(support[i]);
        probs_.push_back(p);
      }
    }
    if (support_.empty()) throw EmptyDataError("pmf has no support points with positive mass");
    if (std::abs(total - 1.0) > kNormalizationTolerance) {
      throw ValidationError("pmf probabilities sum to " + std::to_string(total) + ", not 1");
    }
    cumulative_.resize(probs_.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < probs_.size(); ++i) cumulative_[i] = (acc += probs_[i]);
  }

  static DiscretePMF point_mass(value_type value) { return DiscretePMF({value}, {1.0}); }

  std::span<const value_type> support() const noexcept { return support_; }
  std::span<const double> probs() const noexcept { return probs_; }
  std::size_t size() const noexcept { return support_.size(); }
  value_type min() const noexcept { return support_.front(); }
  value_type max() const noexcept { return support_.back(); }
  bool is_point_mass() const noexcept { return support_.size() == 1; }

  double prob_at(value_type v) const noexcept {
    auto it = std::lower_bound(support_.begin(), support_.end(), v);
    if (it == support_.end() || *it != v) return 0.0;
    return probs_[static_cast<std::size_t>(it - support_.begin())];
  }

  /// P(X <= x).
  double cdf(double x) const noexcept {
    auto it = std::upper_bound(support_.begin(), support_.end(), x,
                               [](double a, value_type b) { return a < static_cast<double>(b); });
    if (it == support_.begin()) return 0.0;
    return cumulative_[static_cast<std::size_t>(it - support_.begin()) - 1];
  }

  /// P(X < x).
  double cdf_below(double x) const noexcept {
    auto it = std::lower_bound(support_.begin(), support_.end(), x,
                               [](value_type a, double b) { return static_cast<double>(a) < b; });
    if (it == support_.begin()) return 0.0;
    return cumulative_[static_cast<std::size_t>(it - support_.begin()) - 1];
  }

  /// P(X > x), accumulated from the upper tail.
  double exceedance(double x) const noexcept {
    double tail = 0.0;
    for (std::size_t i = support_.size(); i-- > 0;) {
      if (static_cast<double>(support_[i]) <= x) break;
      tail += probs_[i];
    }
    return tail;
  }

  /// Nearest-rank quantile: smallest support value whose CDF reaches q.
  value_type quantile(double q) const noexcept {
    auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), q - kLevelTolerance);
    if (it == cumulative_.end()) return support_.back();
    return support_[static_cast<std::size_t>(it - cumulative_.begin())];
  }

  /// Index into support() of the value an inverse-CDF draw u in [0,1) maps to.
  std::size_t inverse_cdf_index(double u) const noexcept {
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) return support_.size() - 1;
    return static_cast<std::size_t>(it - cumulative_.begin());
  }

  double mean() const noexcept {
    double m = 0.0;
    for (std::size_t i = 0; i < support_.size(); ++i) {
      m += static_cast<double>(support_[i]) * probs_[i];
    }
    return m;
  }

  double variance() const noexcept {
    const double mu = mean();
    double v = 0.0;
    for (std::size_t i = 0; i < support_.size(); ++i) {
      const double d = static_cast<double>(support_[i]) - mu;
      v += d * d * probs_[i];
    }
    return v;
  }

  /// The distribution of -X.
  DiscretePMF negated() const {
    std::vector<value_type> s(support_.rbegin(), support_.rend());
    for (auto& v : s) v = -v;
    return DiscretePMF(std::move(s), std::vector<double>(probs_.rbegin(), probs_.rend()));
  }

  /// The distribution of X + offset.
  DiscretePMF shifted(value_type offset) const {
    std::vector<value_type> s(support_);
    for (auto& v : s) v += offset;
    return DiscretePMF(std::move(s), probs_);
  }

  friend bool operator==(const DiscretePMF& a, const DiscretePMF& b) {
    return a.support_ == b.support_ && a.probs_ == b.probs_;
  }

 private:
  std::vector<value_type> support_;
  std::vector<double> probs_;
  std::vector<double> cumulative_;
};

/// A quantity known exactly.
struct PointMass {
  std::int64_t value = 0;
  DiscretePMF as_pmf() const { return DiscretePMF::point_mass(value); }
  friend constexpr bool operator==(PointMass, PointMass) = default;
};

/// Empirical PMF from value -> occurrence counts. Zero-count values are dropped.
inline DiscretePMF pmf_from_counts(const std::map<std::int64_t, std::int64_t>& counts) {
  std::int64_t total = 0;
  for (const auto& [value, count] : counts) {
    if (count < 0) throw DataError("negative count for value " + std::to_string(value));
    total += count;
  }
  if (total == 0) throw EmptyDataError("no observations to build an empirical distribution");
  std::vector<std::int64_t> support;
  std::vector<double> probs;
  for (const auto& [value, count] : counts) {
    if (count == 0) continue;
    support.push_back(value);
    probs.push_back(static_cast<double>(count) / static_cast<double>(total));
  }
  return DiscretePMF(std::move(support), std::move(probs));
}

/// Empirical PMF from raw observations (e.g. one value per year).
inline DiscretePMF pmf_from_values(std::span<const std::int64_t> values) {
  std::map<std::int64_t, std::int64_t> counts;
  for (auto v : values) ++counts[v];
  return pmf_from_counts(counts);
}

enum class Sign : int { Plus = 1, Minus = -1 };

namespace detail {

inline DiscretePMF from_dense(std::int64_t offset, const std::vector<double>& dense) {
  std::vector<std::int64_t> support;
  std::vector<double> probs;
  double total = 0.0;
  for (std::size_t i = 0; i < dense.size(); ++i) {
    if (dense[i] > 0.0) {
      support.push_back(offset + static_cast<std::int64_t>(i));
      probs.push_back(dense[i]);
      total += dense[i];
    }
  }
  // Products of valid PMFs drift from 1 only by round-off.
  if (std::abs(total - 1.0) > kNormalizationTolerance) {
    for (auto& p : probs) p /= total;
  }
  return DiscretePMF(std::move(support), std::move(probs));
}

}  // namespace detail

/// Support width of the signed sum of independent components.
inline std::int64_t predicted_support_width(std::span<const DiscretePMF> pmfs) {
  std::int64_t width = 1;
  for (const auto& p : pmfs) width += p.max() - p.min();
  return width;
}

/// Exact distribution of sum_i sign_i * X_i for independent X_i.
inline DiscretePMF convolve(std::span<const DiscretePMF> pmfs, std::span<const Sign> signs) {
  if (pmfs.empty()) throw ShapeError("convolve needs at least one distribution");
  if (pmfs.size() != signs.size()) {
    throw ShapeError("convolve: " + std::to_string(pmfs.size()) + " distributions but " +
                     std::to_string(signs.size()) + " signs");
  }
  const std::int64_t width = predicted_support_width(pmfs);
  if (width > kMaxSupportPoints) {
    throw CapacityError("convolution support of " + std::to_string(width) +
                        " points exceeds the cap of " + std::to_string(kMaxSupportPoints));
  }

  auto oriented = [&](std::size_t i) {
    return signs[i] == Sign::Plus ? pmfs[i] : pmfs[i].negated();
  };

  DiscretePMF first = oriented(0);
  std::int64_t offset = first.min();
  std::vector<double> dense(static_cast<std::size_t>(first.max() - first.min() + 1), 0.0);
  for (std::size_t k = 0; k < first.size(); ++k) {
    dense[static_cast<std::size_t>(first.support()[k] - offset)] = first.probs()[k];
  }

  for (std::size_t i = 1; i < pmfs.size(); ++i) {
    const DiscretePMF next = oriented(i);
    std::vector<double> out(dense.size() + static_cast<std::size_t>(next.max() - next.min()), 0.0);
    for (std::size_t a = 0; a < dense.size(); ++a) {
      const double pa = dense[a];
      if (pa == 0.0) continue;
      for (std::size_t k = 0; k < next.size(); ++k) {
        out[a + static_cast<std::size_t>(next.support()[k] - next.min())] += pa * next.probs()[k];
      }
    }
    dense = std::move(out);
    offset += next.min();
  }
  return detail::from_dense(offset, dense);
}

inline DiscretePMF convolve(std::initializer_list<DiscretePMF> pmfs,
                            std::initializer_list<Sign> signs) {
  return convolve(std::span<const DiscretePMF>(pmfs.begin(), pmfs.size()),
                  std::span<const Sign>(signs.begin(), signs.size()));
}

namespace detail {

inline double log_choose(std::int64_t n, std::int64_t k) {
  return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

}  // namespace detail

/// Binomial(trials, p) on {0..trials}.
inline DiscretePMF binomial_pmf(std::int64_t trials, double p) {
  if (trials < 0) throw DomainError("binomial trials must be non-negative");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("binomial probability must lie in [0, 1]");
  if (p == 0.0 || trials == 0) return DiscretePMF::point_mass(0);
  if (p == 1.0) return DiscretePMF::point_mass(trials);
  if (trials > kMaxSupportPoints) throw CapacityError("binomial trials exceed the support cap");

  const auto n = static_cast<std::size_t>(trials);
  std::vector<std::int64_t> support(n + 1);
  std::vector<double> probs(n + 1);
  // Direct products stay exact for dyadic p and small n; beyond 1000 trials
  // the binomial coefficients overflow, so switch to log space.
  const bool direct = trials <= 1000;
  double coeff = 1.0;
  for (std::size_t k = 0; k <= n; ++k) {
    support[k] = static_cast<std::int64_t>(k);
    if (direct) {
      probs[k] = coeff * std::pow(p, static_cast<double>(k)) *
                 std::pow(1.0 - p, static_cast<double>(n - k));
      coeff = coeff * static_cast<double>(n - k) / static_cast<double>(k + 1);
    } else {
      probs[k] = std::exp(detail::log_choose(trials, static_cast<std::int64_t>(k)) +
                          static_cast<double>(k) * std::log(p) +
                          static_cast<double>(n - k) * std::log1p(-p));
    }
  }
  return detail::from_dense(0, probs);
}

/// Beta-binomial(trials, alpha, beta): the predictive count of successes when
/// the success probability has a Beta(alpha, beta) distribution.
inline DiscretePMF beta_binomial_pmf(std::int64_t trials, double alpha, double beta) {
  if (trials < 0) throw DomainError("beta-binomial trials must be non-negative");
  if (!(alpha > 0.0 && beta > 0.0) || !std::isfinite(alpha) || !std::isfinite(beta)) {
    throw DomainError("beta-binomial shape parameters must be positive and finite");
  }
  if (trials == 0) return DiscretePMF::point_mass(0);
  if (trials > kMaxSupportPoints) throw CapacityError("beta-binomial trials exceed the support cap");
  auto log_beta = [](double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  };
  const auto n = static_cast<std::size_t>(trials);
  std::vector<double> probs(n + 1);
  double total = 0.0;
  for (std::size_t k = 0; k <= n; ++k) {
    const double kd = static_cast<double>(k);
    probs[k] = std::exp(detail::log_choose(trials, static_cast<std::int64_t>(k)) +
                        log_beta(kd + alpha, static_cast<double>(n - k) + beta) -
                        log_beta(alpha, beta));
    total += probs[k];
  }
  for (auto& p : probs) p /= total;
  return detail::from_dense(0, probs);
}

}  // namespace quotaplan
