#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace rmdur {

// Philox4x32-10 counter-based generator.  Each (key, counter) pair maps to an
// independent 128-bit block, so the stream for (seed, replicate, subject) is
// identical no matter how replicates are scheduled across threads.
struct philox4x32 {
  static constexpr uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
  static constexpr uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;

  static std::array<uint32_t, 4> block(std::array<uint32_t, 4> x, std::array<uint32_t, 2> k) {
    for (int r = 0; r < 10; ++r) {
      uint64_t p0 = uint64_t(M0) * x[0];
      uint64_t p1 = uint64_t(M1) * x[2];
      x = {uint32_t(p1 >> 32) ^ x[1] ^ k[0], uint32_t(p1),
           uint32_t(p0 >> 32) ^ x[3] ^ k[1], uint32_t(p0)};
      k[0] += W0;
      k[1] += W1;
    }
    return x;
  }
};

// one subject-level stream: key = seed, counter = (stream hi, stream lo, block index)
class philox_stream {
 public:
  philox_stream(uint64_t seed, uint32_t hi, uint32_t lo)
      : key_{uint32_t(seed), uint32_t(seed >> 32)}, pre_{hi, lo} {}

  uint32_t next_u32() {
    if (have_ == 0) {
      buf_ = philox4x32::block({pre_[0], pre_[1], uint32_t(blk_), uint32_t(blk_ >> 32)}, key_);
      have_ = 4;
      ++blk_;
    }
    return buf_[4 - have_--];
  }

  // 53-bit uniform on the open interval (0,1)
  double u01() {
    uint32_t a = next_u32();
    uint32_t b = next_u32();
    uint64_t u = (uint64_t(a) << 32) | b;
    return double((u >> 11) + 0.5) * 0x1p-53;
  }

  double exponential(double rate) { return -std::log(u01()) / rate; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = u01(), u2 = u01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925287 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  // Marsaglia-Tsang; unit scale
  double gamma(double shape) {
    if (shape < 1.0) {
      double g = gamma(shape + 1.0);
      return g * std::pow(u01(), 1.0 / shape);
    }
    double d = shape - 1.0 / 3.0;
    double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x = normal();
      double v = 1.0 + c * x;
      if (v <= 0.0) continue;
      v = v * v * v;
      double u = u01();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

 private:
  std::array<uint32_t, 2> key_;
  std::array<uint32_t, 2> pre_;
  uint64_t blk_ = 0;
  std::array<uint32_t, 4> buf_{};
  int have_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace rmdur
