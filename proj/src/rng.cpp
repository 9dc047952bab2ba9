#include "cnma/rng.hpp"

#include <cmath>

namespace cnma {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

std::uint64_t split_seed(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

PhiloxEngine::PhiloxEngine(std::uint64_t key, std::uint64_t stream)
    : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)},
      stream_(stream) {}

void PhiloxEngine::refill() {
  const std::array<std::uint32_t, 4> ctr = {
      static_cast<std::uint32_t>(counter_), static_cast<std::uint32_t>(counter_ >> 32),
      static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
  block_ = philox4x32(ctr, key_);
  ++counter_;
  block_pos_ = 0;
}

std::uint32_t PhiloxEngine::next_u32() {
  if (block_pos_ >= 4) refill();
  return block_[block_pos_++];
}

std::uint64_t PhiloxEngine::next_u64() {
  const std::uint64_t lo = next_u32();
  const std::uint64_t hi = next_u32();
  return (hi << 32) | lo;
}

double PhiloxEngine::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double PhiloxEngine::next_double_pos() {
  return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

int PhiloxEngine::uniform_int(int lo, int hi) {
  const std::uint64_t range = static_cast<std::uint64_t>(hi) - lo + 1;
  const std::uint64_t limit = (0x100000000ull / range) * range;
  std::uint64_t x;
  do {
    x = next_u32();
  } while (x >= limit);
  return lo + static_cast<int>(x % range);
}

double PhiloxEngine::normal(double mean, double sd) {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return mean + sd * cached_normal_;
  }
  const double u1 = next_double_pos();
  const double u2 = next_double();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double t = 2.0 * M_PI * u2;
  cached_normal_ = r * std::sin(t);
  has_cached_normal_ = true;
  return mean + sd * r * std::cos(t);
}

int PhiloxEngine::binomial(int n, double p) {
  int count = 0;
  for (int i = 0; i < n; ++i)
    if (next_double() < p) ++count;
  return count;
}

}  // namespace cnma
