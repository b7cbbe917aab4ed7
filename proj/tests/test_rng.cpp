#include "doctest.h"

#include <array>
#include <cmath>
#include <cstdint>

#include "core/philox.hpp"

using namespace rmdur;

TEST_SUITE("rng") {
  // the three reference vectors published with the Random123 suite for
  // philox4x32 with 10 rounds
  TEST_CASE("known-answer vectors") {
    auto r0 = philox4x32::block({0u, 0u, 0u, 0u}, {0u, 0u});
    CHECK(r0 == std::array<uint32_t, 4>{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});

    auto r1 = philox4x32::block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                {0xffffffffu, 0xffffffffu});
    CHECK(r1 == std::array<uint32_t, 4>{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});

    auto r2 = philox4x32::block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                {0xa4093822u, 0x299f31d0u});
    CHECK(r2 == std::array<uint32_t, 4>{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
  }

  TEST_CASE("stream replays exactly for the same coordinates") {
    philox_stream a(42, 3, 17);
    philox_stream b(42, 3, 17);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u32() == b.next_u32());
  }

  TEST_CASE("the first words of a stream are the keyed block at counter zero") {
    philox_stream s(0x0123456789abcdefull, 7, 9);
    auto blk = philox4x32::block({7u, 9u, 0u, 0u},
                                {0x89abcdefu, 0x01234567u});  // key = (lo, hi) of the seed
    for (int i = 0; i < 4; ++i) CHECK(s.next_u32() == blk[size_t(i)]);
  }

  TEST_CASE("distinct stream coordinates decorrelate immediately") {
    philox_stream a(1, 0, 0), b(1, 0, 1), c(2, 0, 0);
    int equal_ab = 0, equal_ac = 0;
    for (int i = 0; i < 64; ++i) {
      uint32_t x = a.next_u32();
      if (x == b.next_u32()) ++equal_ab;
      if (x == c.next_u32()) ++equal_ac;
    }
    CHECK(equal_ab == 0);
    CHECK(equal_ac == 0);
  }

  TEST_CASE("u01 lies strictly inside (0,1) and consumes two words") {
    philox_stream s(9, 0, 0);
    for (int i = 0; i < 1000; ++i) {
      double u = s.u01();
      CHECK(u > 0.0);
      CHECK(u < 1.0);
    }
    // two draws per u01: the 2000th word of a fresh stream comes next
    philox_stream t(9, 0, 0);
    for (int i = 0; i < 2000; ++i) t.next_u32();
    philox_stream u(9, 0, 0);
    for (int i = 0; i < 1000; ++i) u.u01();
    CHECK(t.next_u32() == u.next_u32());
  }

  TEST_CASE("uniform sample moments") {
    philox_stream s(123, 1, 1);
    const int N = 200000;
    double m = 0, v = 0;
    for (int i = 0; i < N; ++i) {
      double u = s.u01();
      m += u;
      v += (u - 0.5) * (u - 0.5);
    }
    m /= N;
    v /= N;
    CHECK(std::abs(m - 0.5) < 0.002);           // se ~ 0.00065
    CHECK(std::abs(v - 1.0 / 12.0) < 0.002);
  }

  TEST_CASE("normal sample moments and spare caching") {
    philox_stream s(7, 2, 5);
    const int N = 200000;
    double m = 0, v = 0, k = 0;
    for (int i = 0; i < N; ++i) {
      double z = s.normal();
      m += z;
      v += z * z;
      k += z * z * z * z;
    }
    m /= N;
    v /= N;
    k /= N;
    CHECK(std::abs(m) < 0.01);
    CHECK(std::abs(v - 1.0) < 0.02);
    CHECK(std::abs(k - 3.0) < 0.1);
    // consecutive draws share a Box-Muller pair: two normals consume exactly
    // the two uniforms of one pair
    philox_stream a(7, 2, 5), b(7, 2, 5);
    a.normal();
    a.normal();
    b.u01();
    b.u01();
    CHECK(a.next_u32() == b.next_u32());
  }

  TEST_CASE("exponential has the requested rate") {
    philox_stream s(55, 0, 3);
    const int N = 200000;
    double m = 0;
    for (int i = 0; i < N; ++i) m += s.exponential(4.0);
    m /= N;
    CHECK(std::abs(m - 0.25) < 0.005);
  }

  TEST_CASE("gamma matches mean and variance for shapes below and above one") {
    for (double shape : {0.5, 1.0, 3.5}) {
      philox_stream s(99, 0, uint32_t(shape * 10));
      const int N = 200000;
      double m = 0, v = 0;
      for (int i = 0; i < N; ++i) m += s.gamma(shape);
      m /= N;
      philox_stream s2(99, 0, uint32_t(shape * 10));
      for (int i = 0; i < N; ++i) {
        double g = s2.gamma(shape);
        v += (g - shape) * (g - shape);
      }
      v /= N;
      CHECK(std::abs(m - shape) < 0.03 * std::max(1.0, shape));
      CHECK(std::abs(v - shape) < 0.08 * std::max(1.0, shape));
    }
  }
}
