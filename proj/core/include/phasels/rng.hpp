#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace phasels {

/// Philox4x32-10 counter-based generator. A stream is identified by
/// (seed, stream_a, stream_b); streams derived from distinct triples are
/// statistically independent, so per-trial substreams can be drawn in any
/// order (or in parallel) with byte-identical results.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream_a = 0,
                     std::uint64_t stream_b = 0) {
    std::uint64_t s = seed;
    const std::uint64_t ka = splitmix64(s);
    s ^= 0x9E3779B97F4A7C15ULL + stream_a;
    const std::uint64_t kb = splitmix64(s);
    s ^= 0xC2B2AE3D27D4EB4FULL + stream_b;
    const std::uint64_t kc = splitmix64(s);
    key_ = {static_cast<std::uint32_t>(ka), static_cast<std::uint32_t>(ka >> 32)};
    counter_ = {static_cast<std::uint32_t>(kb), static_cast<std::uint32_t>(kb >> 32),
                static_cast<std::uint32_t>(kc), static_cast<std::uint32_t>(kc >> 32)};
  }

  std::uint32_t next_u32() {
    if (buffer_pos_ == 4) {
      buffer_ = philox10(counter_, key_);
      advance_counter();
      buffer_pos_ = 0;
    }
    return buffer_[buffer_pos_++];
  }

  std::uint64_t next_u64() {
    const std::uint64_t hi = next_u32();
    const std::uint64_t lo = next_u32();
    return (hi << 32) | lo;
  }

  /// Uniform double in [0, 1), 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1p-53; }

  /// Uniform double in (0, 1].
  double uniform01_open_low() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1p-53;
  }

  /// Uniform integer in [lo, hi] inclusive.
  int uniform_int(int lo, int hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(next_u64() % span);
  }

  /// Standard normal via Box-Muller; pairs cached.
  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    const double u1 = uniform01_open_low();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
  }

 private:
  static std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  static void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                      std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
  }

  static std::array<std::uint32_t, 4> philox10(std::array<std::uint32_t, 4> c,
                                               std::array<std::uint32_t, 2> k) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        k[0] += 0x9E3779B9u;
        k[1] += 0xBB67AE85u;
      }
      std::uint32_t hi0, lo0, hi1, lo1;
      mulhilo(0xD2511F53u, c[0], hi0, lo0);
      mulhilo(0xCD9E8D57u, c[2], hi1, lo1);
      c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }
    return c;
  }

  void advance_counter() {
    for (int i = 0; i < 4; ++i) {
      if (++counter_[i] != 0) break;
    }
  }

  std::array<std::uint32_t, 2> key_{};
  std::array<std::uint32_t, 4> counter_{};
  std::array<std::uint32_t, 4> buffer_{};
  int buffer_pos_ = 4;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace phasels
