#include "core/stepfun.hpp"

#include "core/errors.hpp"

namespace rmdur {

std::vector<double> merge_grid(double a, double b,
                               std::initializer_list<const std::vector<double>*> knots) {
  if (!(a <= b)) throw domain_error("merge_grid: empty interval");
  std::vector<double> g;
  g.push_back(a);
  for (const auto* ks : knots)
    for (double k : *ks)
      if (k > a && k < b) g.push_back(k);
  std::sort(g.begin() + 1, g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  if (b > a) g.push_back(b);
  return g;
}

}  // namespace rmdur
