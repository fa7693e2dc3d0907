#pragma once

// Empirical samples and seeded, chunk-parallel sampling from PMFs.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <span>
#include <thread>
#include <vector>

#include "quotaplan/errors.hpp"
#include "quotaplan/pmf.hpp"
#include "quotaplan/rng.hpp"

namespace quotaplan {

/// How a simulated sample was produced. Absent for observed data.
struct SampleProvenance {
  Seed seed;
  std::size_t draws = 0;
  friend bool operator==(const SampleProvenance&, const SampleProvenance&) = default;
};

template <typename T = std::int64_t>
  requires std::integral<T> || std::floating_point<T>
class EmpiricalSample {
 public:
  using value_type = T;

  explicit EmpiricalSample(std::vector<T> draws, std::optional<SampleProvenance> provenance = {})
      : draws_(std::move(draws)), sorted_(draws_), provenance_(provenance) {
    if (draws_.empty()) throw EmptyDataError("empirical sample has no draws");
    if constexpr (std::floating_point<T>) {
      for (T v : draws_) {
        if (!std::isfinite(v)) throw ValidationError("empirical sample contains a non-finite value");
      }
    }
    std::sort(sorted_.begin(), sorted_.end());
  }

  std::span<const T> draws() const noexcept { return draws_; }
  std::span<const T> sorted() const noexcept { return sorted_; }
  std::size_t size() const noexcept { return draws_.size(); }
  const std::optional<SampleProvenance>& provenance() const noexcept { return provenance_; }

  /// Empirical P(X <= x).
  double cdf(double x) const noexcept {
    auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x,
                               [](double a, T b) { return a < static_cast<double>(b); });
    return fraction(it - sorted_.begin());
  }

  /// Empirical P(X < x).
  double cdf_below(double x) const noexcept {
    auto it = std::lower_bound(sorted_.begin(), sorted_.end(), x,
                               [](T a, double b) { return static_cast<double>(a) < b; });
    return fraction(it - sorted_.begin());
  }

  double exceedance(double x) const noexcept {
    auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x,
                               [](double a, T b) { return a < static_cast<double>(b); });
    return fraction(sorted_.end() - it);
  }

  /// Nearest rank: the k-th order statistic with k = ceil(q n).
  T quantile(double q) const noexcept {
    const double n = static_cast<double>(sorted_.size());
    auto rank = static_cast<std::size_t>(std::ceil((q - kLevelTolerance) * n));
    rank = std::clamp<std::size_t>(rank, 1, sorted_.size());
    return sorted_[rank - 1];
  }

  double mean() const noexcept {
    double m = 0.0;
    for (T v : draws_) m += static_cast<double>(v);
    return m / static_cast<double>(draws_.size());
  }

  T min() const noexcept { return sorted_.front(); }
  T max() const noexcept { return sorted_.back(); }

  /// value -> occurrence count.
  std::map<T, std::size_t> histogram() const {
    std::map<T, std::size_t> h;
    for (T v : sorted_) ++h[v];
    return h;
  }

  friend bool operator==(const EmpiricalSample& a, const EmpiricalSample& b) {
    return a.draws_ == b.draws_ && a.provenance_ == b.provenance_;
  }

 private:
  double fraction(std::ptrdiff_t count) const noexcept {
    return static_cast<double>(count) / static_cast<double>(sorted_.size());
  }

  std::vector<T> draws_;
  std::vector<T> sorted_;
  std::optional<SampleProvenance> provenance_;
};

/// Anything the quantile-based products can be computed on.
template <typename D>
concept PredictiveDistribution = requires(const D& d, double x) {
  typename D::value_type;
  { d.quantile(x) } -> std::convertible_to<typename D::value_type>;
  { d.cdf(x) } -> std::convertible_to<double>;
  { d.cdf_below(x) } -> std::convertible_to<double>;
  { d.exceedance(x) } -> std::convertible_to<double>;
};

inline void check_level(double q, const char* what = "quantile level") {
  if (!(q > 0.0 && q < 1.0)) {
    throw DomainError(std::string(what) + " must lie strictly between 0 and 1");
  }
}

/// Nearest-rank quantile: smallest value y with CDF(y) >= q.
template <PredictiveDistribution D>
typename D::value_type quantile(const D& dist, double q) {
  check_level(q);
  return dist.quantile(q);
}

/// P(X > threshold).
template <PredictiveDistribution D>
double exceedance(const D& dist, double threshold) {
  return dist.exceedance(threshold);
}

/// Runs fill(chunk_index, begin, end) over [0, n) in kChunkSize pieces on up
/// to `threads` workers (0 = hardware concurrency). Output must depend only
/// on the chunk index, never on which worker ran it.
template <typename Fill>
void for_each_chunk(std::size_t n, unsigned threads, Fill&& fill) {
  const std::size_t chunks = (n + kChunkSize - 1) / kChunkSize;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  const auto workers = static_cast<std::size_t>(std::min<std::size_t>(threads, chunks));
  auto run = [&](std::size_t worker) {
    for (std::size_t c = worker; c < chunks; c += workers) {
      fill(c, c * kChunkSize, std::min(n, (c + 1) * kChunkSize));
    }
  };
  if (workers <= 1) {
    run(0);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run, w);
}

/// n independent draws from dist by inverse CDF.
inline EmpiricalSample<std::int64_t> sample(const DiscretePMF& dist, std::size_t n, Seed seed,
                                            unsigned threads = 0) {
  if (n == 0) throw DomainError("sample size must be at least 1");
  std::vector<std::int64_t> draws(n);
  for_each_chunk(n, threads, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
    Xoshiro256 rng(derive_stream_seed(seed, chunk));
    for (std::size_t i = begin; i < end; ++i) {
      draws[i] = dist.support()[dist.inverse_cdf_index(rng.uniform())];
    }
  });
  return EmpiricalSample<std::int64_t>(std::move(draws), SampleProvenance{seed, n});
}

}  // namespace quotaplan
