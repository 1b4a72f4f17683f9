#pragma once

// Counter-based random streams.
//
// Every random quantity in the library is addressed by a key derived from
// (seed, tag, index...) rather than drawn from a stateful engine, so results
// do not depend on evaluation order or on how work is split across threads.
//
// Gaussian variates are produced by inverting the standard normal CDF at a
// 53-bit uniform in the open interval (0, 1). The inverse uses Acklam's
// rational approximation followed by one Halley step against std::erfc.

#include <cstdint>
#include <initializer_list>

namespace mgd {

/// SplitMix64 finalizer. Bijective on 64-bit words.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Folds a list of words into a single key, starting from `seed`.
std::uint64_t derive_key(std::uint64_t seed,
                         std::initializer_list<std::uint64_t> parts) noexcept;

/// Maps 64 random bits to ((bits >> 11) + 0.5) * 2^-53, strictly inside (0, 1).
double uniform_open(std::uint64_t bits) noexcept;

/// Quantile function of N(0, 1) for p in (0, 1).
double inverse_normal_cdf(double p);

/// Standard Gaussian variate addressed by `key`.
double gaussian_at(std::uint64_t key) noexcept;

/// Integer in [0, bound) from 64 random bits (multiply-high reduction).
std::uint64_t bounded_at(std::uint64_t bits, std::uint64_t bound) noexcept;

/// Sequential view over a counter-based stream: the i-th draw is keyed by
/// (key, i). Cheap to copy; two copies with the same key produce the same
/// sequence.
class CounterStream {
 public:
  explicit CounterStream(std::uint64_t key) noexcept : key_(key) {}

  std::uint64_t next_bits() noexcept;
  double next_gaussian() noexcept { return gaussian_at(next_bits()); }
  double next_uniform() noexcept { return uniform_open(next_bits()); }
  std::uint64_t next_below(std::uint64_t bound) noexcept {
    return bounded_at(next_bits(), bound);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace mgd
