#pragma once

#include <cstdint>
#include <limits>
#include <string_view>

namespace hom {

/// Name and version of the pseudorandom pipeline; recorded in every output
/// that contains simulated counts.
inline constexpr std::string_view kRngAlgorithm = "splitmix64-counter/poisson-ptrd v1";

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Key of an independent stream identified by (seed, stream index).
constexpr std::uint64_t stream_key(std::uint64_t seed, std::uint64_t stream) noexcept {
  return mix64(seed ^ mix64(stream + 0x9e3779b97f4a7c15ULL));
}

/// Counter-based generator: the k-th output of a stream is mix64(key + k * golden).
/// Satisfies UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  constexpr explicit CounterRng(std::uint64_t key) noexcept : key_(key) {}
  constexpr CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
      : key_(stream_key(seed, stream)) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() noexcept {
    ++counter_;
    return mix64(key_ + counter_ * 0x9e3779b97f4a7c15ULL);
  }

  [[nodiscard]] constexpr std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// One Poisson variate with the given mean (mean 0 yields 0).
std::int64_t sample_poisson(CounterRng& rng, double mean);

}  // namespace hom
