#include "doctest.h"

#include <cmath>

#include "core/numeric.hpp"
#include "core/stepfun.hpp"

using namespace rmdur;

TEST_SUITE("stepfun") {
  TEST_CASE("step curve is right continuous with v0 before the first jump") {
    step_curve s;
    s.v0 = 1.0;
    s.t = {1.0, 2.0, 4.0};
    s.v = {0.8, 0.5, 0.1};
    CHECK(s(0.0) == 1.0);
    CHECK(s(0.999999) == 1.0);
    CHECK(s(1.0) == 0.8);  // value changes at the jump time itself
    CHECK(s(1.5) == 0.8);
    CHECK(s(2.0) == 0.5);
    CHECK(s(3.9) == 0.5);
    CHECK(s(4.0) == 0.1);
    CHECK(s(100.0) == 0.1);
  }

  TEST_CASE("empty step curve is the constant v0") {
    step_curve s;
    s.v0 = 0.25;
    CHECK(s(-3.0) == 0.25);
    CHECK(s(7.0) == 0.25);
  }

  TEST_CASE("merge_grid keeps endpoints, sorts, dedupes, drops outside knots") {
    std::vector<double> k1 = {0.5, 2.0, 9.0};
    std::vector<double> k2 = {2.0, 3.0, -1.0, 5.0};
    auto g = merge_grid(1.0, 5.0, {&k1, &k2});
    // 0.5 and -1.0 are below a, 9.0 above b, 5.0 collides with b, 2.0 repeats
    CHECK(g == std::vector<double>{1.0, 2.0, 3.0, 5.0});
  }

  TEST_CASE("merge_grid with no interior knots is the bare interval") {
    std::vector<double> k = {0.0, 10.0};
    auto g = merge_grid(3.0, 4.0, {&k});
    CHECK(g == std::vector<double>{3.0, 4.0});
  }

  TEST_CASE("step_integral is exact for cell-wise constant integrands") {
    std::vector<double> g = {0.0, 1.0, 2.5, 4.0};
    step_curve s;
    s.v0 = 2.0;
    s.t = {1.0, 2.5};
    s.v = {3.0, 0.5};
    // 2*1 + 3*1.5 + 0.5*1.5 = 7.25
    CHECK(step_integral(g, [&](double t) { return s(t); }) == doctest::Approx(7.25).epsilon(1e-15));
  }

  TEST_CASE("step_integral of 1 returns the window length to machine precision") {
    std::vector<double> g;
    g.push_back(0.0);
    for (int i = 1; i <= 1000; ++i) g.push_back(g.back() + 0.001 * (1.0 + 0.3 * (i % 7)));
    const double len = g.back() - g.front();
    CHECK(std::abs(step_integral(g, [](double) { return 1.0; }) - len) < 1e-13);
  }

  TEST_CASE("compensated accumulation survives catastrophic cancellation") {
    kahan a;
    a.add(1e16);
    a.add(1.0);
    a.add(1.0);
    a.add(-1e16);
    CHECK(a.sum() == 2.0);
    // plain double addition loses the ones entirely
    CHECK(((1e16 + 1.0 + 1.0) - 1e16) != 2.0);
  }

  TEST_CASE("ksum is stable under permutation") {
    std::vector<double> xs;
    for (int i = 0; i < 2000; ++i) xs.push_back(std::sin(i) * std::pow(10.0, i % 14));
    double fwd = ksum(xs);
    std::vector<double> rev(xs.rbegin(), xs.rend());
    CHECK(std::abs(ksum(rev) - fwd) <= 1e-12 * std::abs(fwd));
  }

  TEST_CASE("cholesky solves and inverts an SPD matrix") {
    // A = [[4,2,0.5],[2,3,1],[0.5,1,2]]
    std::vector<double> A = {4, 2, 0.5, 2, 3, 1, 0.5, 1, 2};
    std::vector<double> L = A;
    REQUIRE(cholesky(L, 3));
    std::vector<double> b = {1.0, -2.0, 0.5};
    std::vector<double> x(3);
    chol_solve(L, 3, b.data(), x.data());
    for (int i = 0; i < 3; ++i) {
      double r = 0;
      for (int j = 0; j < 3; ++j) r += A[i * 3 + j] * x[j];
      CHECK(r == doctest::Approx(b[i]).epsilon(1e-12));
    }
    auto inv = chol_inverse(L, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double r = 0;
        for (int k = 0; k < 3; ++k) r += A[i * 3 + k] * inv[k * 3 + j];
        CHECK(r == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
      }
  }

  TEST_CASE("cholesky rejects an indefinite matrix") {
    std::vector<double> A = {1, 2, 2, 1};  // eigenvalues 3, -1
    CHECK_FALSE(cholesky(A, 2));
  }

  TEST_CASE("format_double round trips exactly") {
    for (double x : {0.0, 1.0, -1.5, 0.1, 1e-300, 1.7976931348623157e308, 3.141592653589793,
                     1.0913564, -2.2250738585072014e-308}) {
      CHECK(parse_double(format_double(x)) == x);
    }
  }

  TEST_CASE("parse_double rejects trailing garbage") {
    CHECK_THROWS_AS(parse_double("1.5x"), parse_error);
    CHECK_THROWS_AS(parse_double(""), parse_error);
    CHECK_THROWS_AS(parse_double("nanara"), parse_error);
  }

  TEST_CASE("normal_cdf hits known quantiles") {
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
    CHECK(normal_cdf(-1.959963984540054) == doctest::Approx(0.025).epsilon(1e-12));
  }
}
