// SPDX-License-Identifier: Apache-2.0
//
// Reproducible random numbers. The generator is xoshiro256** (Blackman and
// Vigna, 2018) with its 256-bit state expanded from a 64-bit seed by
// SplitMix64. Every derived distribution below is written out explicitly so
// the same seed yields the same stream on any platform or language port;
// nothing here goes through <random> distributions, whose algorithms are
// implementation-defined.

#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "atn/numkit/matrix.hpp"

namespace atn {

class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) { reseed(seed); }

  void reseed(std::uint64_t seed) noexcept;
  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() noexcept;
  /// Uniform on [0, 1) with 53 random mantissa bits: (next_u64() >> 11) * 2^-53.
  double next_unit() noexcept;
  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * next_unit(); }
  /// Uniform integer in [0, bound), bound > 0. Rejection sampling on the top
  /// bits, so the result is unbiased.
  std::uint64_t below(std::uint64_t bound) noexcept;
  /// Standard normal via the Box-Muller transform; the second variate of each
  /// pair is cached and returned by the next call.
  double standard_normal() noexcept;

 private:
  std::uint64_t seed_ = 0;
  std::array<std::uint64_t, 4> s_{};
  std::optional<double> spare_;
};

/// i.i.d. uniform samples on [lo, hi). Throws std::invalid_argument unless lo < hi.
Matrix rng_uniform(Rng& rng, double lo, double hi, std::size_t rows, std::size_t cols);
/// i.i.d. Gaussian samples with the given mean and variance. var == 0 yields
/// a constant matrix. Throws std::invalid_argument for negative variance.
Matrix rng_gaussian(Rng& rng, double mean, double var, std::size_t rows, std::size_t cols);

}  // namespace atn
