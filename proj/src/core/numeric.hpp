#pragma once

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <string>
#include <string_view>
#include <vector>

#include "core/errors.hpp"

namespace rmdur {

// Neumaier compensated accumulator: reduction results stay stable (to well
// below 1e-12) under reordering of the inputs
struct kahan {
  double s = 0.0, c = 0.0;
  void add(double x) {
    double t = s + x;
    if (std::abs(s) >= std::abs(x))
      c += (s - t) + x;
    else
      c += (x - t) + s;
    s = t;
  }
  double sum() const { return s + c; }
};

inline double ksum(const std::vector<double>& xs) {
  kahan a;
  for (double x : xs) a.add(x);
  return a.sum();
}

// in-place lower Cholesky of a symmetric p*p matrix (row major); returns
// false when the matrix is not positive definite
inline bool cholesky(std::vector<double>& a, int p) {
  for (int j = 0; j < p; ++j) {
    double d = a[j * p + j];
    for (int k = 0; k < j; ++k) d -= a[j * p + k] * a[j * p + k];
    if (!(d > 0.0) || !std::isfinite(d)) return false;
    double lj = std::sqrt(d);
    a[j * p + j] = lj;
    for (int i = j + 1; i < p; ++i) {
      double s = a[i * p + j];
      for (int k = 0; k < j; ++k) s -= a[i * p + k] * a[j * p + k];
      a[i * p + j] = s / lj;
    }
    for (int k = j + 1; k < p; ++k) a[j * p + k] = 0.0;
  }
  return true;
}

// solve L L' x = b given the Cholesky factor
inline void chol_solve(const std::vector<double>& L, int p, const double* b, double* x) {
  for (int i = 0; i < p; ++i) {
    double s = b[i];
    for (int k = 0; k < i; ++k) s -= L[i * p + k] * x[k];
    x[i] = s / L[i * p + i];
  }
  for (int i = p - 1; i >= 0; --i) {
    double s = x[i];
    for (int k = i + 1; k < p; ++k) s -= L[k * p + i] * x[k];
    x[i] = s / L[i * p + i];
  }
}

inline std::vector<double> chol_inverse(const std::vector<double>& L, int p) {
  std::vector<double> inv(p * p), e(p, 0.0), col(p);
  for (int j = 0; j < p; ++j) {
    e.assign(p, 0.0);
    e[j] = 1.0;
    chol_solve(L, p, e.data(), col.data());
    for (int i = 0; i < p; ++i) inv[i * p + j] = col[i];
  }
  // symmetrize against round-off
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j) {
      double m = 0.5 * (inv[i * p + j] + inv[j * p + i]);
      inv[i * p + j] = inv[j * p + i] = m;
    }
  return inv;
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// shortest round-trip decimal representation; model artifacts and CSV output
// use this so reruns are byte identical
inline std::string format_double(double x) {
  char buf[40];
  auto r = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, r.ptr);
}

inline double parse_double(std::string_view s) {
  double v = 0.0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw parse_error("not a number: '" + std::string(s) + "'");
  return v;
}

}  // namespace rmdur
