// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace cvqkd {

/// Philox4x32-10 counter-based block generator (Salmon et al., SC'11).
class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Block generate(Block counter, Key key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += 0x9E3779B9u;
        key[1] += 0xBB67AE85u;
      }
      const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * counter[0];
      const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * counter[2];
      counter = {static_cast<std::uint32_t>(p1 >> 32) ^ counter[1] ^ key[0],
                 static_cast<std::uint32_t>(p1),
                 static_cast<std::uint32_t>(p0 >> 32) ^ counter[3] ^ key[1],
                 static_cast<std::uint32_t>(p0)};
    }
    return counter;
  }
};

/// Random stream for one Monte Carlo sample, keyed by (seed, sample index).
///
/// Successive draws walk a block counter, so the values for a given
/// (seed, index) never depend on which worker produced them.
class SampleStream {
 public:
  SampleStream(std::uint64_t seed, std::uint64_t index)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        index_(index) {}

  std::uint64_t next_u64() {
    if (used_ == 2) refill();
    const std::uint64_t value =
        (std::uint64_t{block_[2 * used_]} << 32) | std::uint64_t{block_[2 * used_ + 1]};
    ++used_;
    return value;
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller; consumes two uniforms per pair.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  void refill() {
    block_ = Philox4x32::generate({static_cast<std::uint32_t>(index_),
                                   static_cast<std::uint32_t>(index_ >> 32), counter_++, 0u},
                                  key_);
    used_ = 0;
  }

  Philox4x32::Key key_;
  std::uint64_t index_;
  std::uint32_t counter_ = 0;
  Philox4x32::Block block_{};
  int used_ = 2;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace cvqkd
