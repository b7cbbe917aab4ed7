#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "core/errors.hpp"

namespace rmdur {

// piecewise-constant, right-continuous covariate path: values[s*dim + j] holds
// covariate j on [start[s], start[s+1]); constant extension past the last
// segment; undefined (error) before the first start
struct covariate_trajectory {
  std::vector<double> start;   // strictly increasing segment starts
  std::vector<double> values;  // start.size() * dim, row major by segment
  int dim = 0;

  int nseg() const { return int(start.size()); }
  bool covers(double t) const { return !start.empty() && t >= start.front(); }

  int segment_at(double t) const {
    if (!covers(t)) throw domain_error("trajectory does not cover requested time");
    auto it = std::upper_bound(start.begin(), start.end(), t);
    return int(it - start.begin()) - 1;
  }
  const double* at(double t) const { return values.data() + size_t(segment_at(t)) * dim; }
  double at(double t, int j) const { return at(t)[j]; }
};

struct process_observation {
  double entry = 0.0;  // delayed-entry time (first eligible for the transition)
  double exit = 0.0;   // event or censoring time
  bool event = false;
};

struct subject_record {
  std::string id;
  std::optional<process_observation> promotion;   // absent: never at risk in window
  std::optional<process_observation> retirement;  // absent: never eligible in window
  covariate_trajectory x;                         // promotion-model covariates
  covariate_trajectory z;                         // retirement-model covariates
};

struct restriction_window {
  double tau0 = 0.0;
  double tau1 = 0.0;
};

struct dataset {
  std::vector<subject_record> subjects;
  std::vector<std::string> x_names;  // promotion-model covariate names
  std::vector<std::string> z_names;  // retirement-model covariate names
  std::string protected_column;      // the indicator the counterfactual zeroes
  restriction_window window;
  bool has_window = false;

  int n() const { return int(subjects.size()); }
  // index of a named column, -1 if absent
  static int column_index(const std::vector<std::string>& names, const std::string& c) {
    for (size_t j = 0; j < names.size(); ++j)
      if (names[j] == c) return int(j);
    return -1;
  }
  int x_protected() const { return column_index(x_names, protected_column); }
  int z_protected() const { return column_index(z_names, protected_column); }
};

// per-record diagnostics; empty means the dataset is usable for fitting
std::vector<std::string> validate_dataset(const dataset& ds);

// throws validation_error with the first few diagnostics when invalid
void require_valid(const dataset& ds);

}  // namespace rmdur
