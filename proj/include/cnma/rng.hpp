#pragma once

#include <array>
#include <cstdint>

namespace cnma {

/// Philox 4x32-10 keyed counter block function (Salmon et al., SC'11).
/// Pure function of (counter, key); used as the core of PhiloxEngine and
/// directly testable against the published known-answer vectors.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Splits a 64-bit seed into decorrelated 64-bit values (SplitMix64 step).
std::uint64_t split_seed(std::uint64_t& state);

/// Counter-based random engine. Streams are identified by (key, stream):
/// two engines with different stream ids never overlap, which makes
/// per-run generators in the simulation harness parallel-safe and
/// reproducible independent of thread count.
///
/// Distribution code is self-contained (no std::*_distribution) so the
/// produced sequences are identical across standard libraries.
class PhiloxEngine {
 public:
  PhiloxEngine(std::uint64_t key, std::uint64_t stream);

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  /// Uniform on [0,1) with 53 random bits.
  double next_double();

  /// Uniform on (0,1]; safe as a log() argument.
  double next_double_pos();

  /// Uniform integer on [lo, hi], inclusive, rejection-sampled (no modulo bias).
  int uniform_int(int lo, int hi);

  /// Box-Muller; the second variate of each pair is cached.
  double normal(double mean = 0.0, double sd = 1.0);

  /// Sum of n Bernoulli(p) draws; exact and portable for the small n used here.
  int binomial(int n, double p);

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> block_{};
  int block_pos_ = 4;  // 4 = exhausted
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;

  void refill();
};

}  // namespace cnma
