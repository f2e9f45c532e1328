#pragma once

// Philox4x32-10 counter-based generator. A Stream is addressed by
// (seed, stream id); every draw is a pure function of (seed, stream,
// substream, index), so results do not depend on scheduling.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace sheq::rng {

using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

inline Counter philox4x32(Counter c, Key k) {
  constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
  constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
  for (int r = 0; r < 10; ++r) {
    if (r > 0) {
      k[0] += W0;
      k[1] += W1;
    }
    const std::uint64_t p0 = std::uint64_t(M0) * c[0];
    const std::uint64_t p1 = std::uint64_t(M1) * c[2];
    const std::uint32_t hi0 = std::uint32_t(p0 >> 32), lo0 = std::uint32_t(p0);
    const std::uint32_t hi1 = std::uint32_t(p1 >> 32), lo1 = std::uint32_t(p1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
  return c;
}

/// Uniform on (0, 1): never returns 0 or 1.
inline double to_open_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = (std::uint64_t(hi) << 21) ^ (lo >> 11);  // 53 bits
  return (double(bits & ((1ull << 53) - 1)) + 0.5) * 0x1.0p-53;
}

class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t stream, std::uint32_t substream = 0)
      : key_{std::uint32_t(seed), std::uint32_t(seed >> 32)},
        stream_(stream),
        sub_(substream) {}

  /// Same stream, different substream (e.g. a time step index).
  Stream substream(std::uint32_t s) const {
    Stream r = *this;
    r.sub_ = s;
    r.index_ = 0;
    r.have_ = 0;
    r.have_normal_ = false;
    return r;
  }

  std::uint32_t next_u32() {
    if (have_ == 0) refill();
    return block_[4 - have_--];
  }

  double uniform() {
    const std::uint32_t a = next_u32();
    const std::uint32_t b = next_u32();
    return to_open_unit(a, b);
  }

  double normal() {
    if (have_normal_) {
      have_normal_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * std::numbers::pi * u2;
    spare_ = rad * std::sin(ang);
    have_normal_ = true;
    return rad * std::cos(ang);
  }

  double exponential() { return -std::log(uniform()); }

 private:
  void refill() {
    const Counter c{std::uint32_t(index_), sub_, std::uint32_t(stream_),
                    std::uint32_t(stream_ >> 32)};
    block_ = philox4x32(c, key_);
    ++index_;
    have_ = 4;
  }

  Key key_;
  std::uint64_t stream_;
  std::uint32_t sub_;
  std::uint64_t index_ = 0;
  Counter block_{};
  int have_ = 0;
  bool have_normal_ = false;
  double spare_ = 0.0;
};

/// Positive alpha-stable variable with E exp(-s A) = exp(-s^alpha),
/// alpha in (0, 1], by Kanter's representation.
inline double positive_stable(Stream& s, double alpha) {
  if (alpha >= 1.0) return 1.0;
  const double u = std::numbers::pi * s.uniform();
  const double e = s.exponential();
  const double a = std::sin(alpha * u) / std::pow(std::sin(u), 1.0 / alpha);
  const double b = std::pow(std::sin((1.0 - alpha) * u) / e, (1.0 - alpha) / alpha);
  return a * b;
}

}  // namespace sheq::rng
