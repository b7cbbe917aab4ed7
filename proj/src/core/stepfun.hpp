#pragma once

#include <algorithm>
#include <initializer_list>
#include <vector>

#include "core/numeric.hpp"

namespace rmdur {

// right-continuous step function: v0 before the first jump time, v[i] on
// [t[i], t[i+1})
struct step_curve {
  double v0 = 1.0;
  std::vector<double> t;  // strictly increasing jump times
  std::vector<double> v;  // value from t[i] onward

  double operator()(double time) const {
    size_t i = std::upper_bound(t.begin(), t.end(), time) - t.begin();
    return i == 0 ? v0 : v[i - 1];
  }
};

// {a, knots strictly inside (a,b), b}: the integration grid for step-function
// products over [a, b]
std::vector<double> merge_grid(double a, double b,
                               std::initializer_list<const std::vector<double>*> knots);

// exact integral over [grid.front(), grid.back()] of a function that is
// constant on each grid cell; f is sampled at cell left endpoints
template <class F>
double step_integral(const std::vector<double>& grid, F&& f) {
  kahan acc;
  for (size_t j = 0; j + 1 < grid.size(); ++j)
    acc.add(f(grid[j]) * (grid[j + 1] - grid[j]));
  return acc.sum();
}

}  // namespace rmdur
