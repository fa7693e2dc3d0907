#pragma once

// Seeded random streams.
//
// Generator: xoshiro256** (Blackman & Vigna), state initialised from a 64-bit
// seed through four SplitMix64 steps. Uniform doubles take the top 53 bits.
//
// Stream splitting: work is cut into fixed-size chunks and chunk k draws from
// its own generator seeded with
//
//     derive_stream_seed(seed, k) = seed XOR mix64(k + 0x9E3779B97F4A7C15)
//
// where mix64 is the SplitMix64 finaliser. Chunk boundaries never depend on
// the number of worker threads, so results are identical for any thread
// count.

#include <array>
#include <cstddef>
#include <cstdint>

namespace quotaplan {

struct Seed {
  std::uint64_t value = 0;
  friend constexpr bool operator==(Seed, Seed) = default;
};

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr Seed derive_stream_seed(Seed seed, std::uint64_t stream) noexcept {
  return Seed{seed.value ^ mix64(stream + 0x9E3779B97F4A7C15ULL)};
}

class SplitMix64 {
 public:
  constexpr explicit SplitMix64(std::uint64_t state) noexcept : state_(state) {}
  constexpr std::uint64_t next() noexcept {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix64(state_);
  }

 private:
  std::uint64_t state_;
};

class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  constexpr explicit Xoshiro256(Seed seed) noexcept {
    SplitMix64 sm(seed.value);
    for (auto& s : state_) s = sm.next();
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  constexpr result_type operator()() noexcept {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform on [0, 1).
  constexpr double uniform() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  /// Uniform on (0, 1].
  constexpr double uniform_open_closed() noexcept { return 1.0 - uniform(); }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }
  std::array<std::uint64_t, 4> state_{};
};

/// Draws per chunk in every chunked sampler.
inline constexpr std::size_t kChunkSize = 1u << 16;

}  // namespace quotaplan
