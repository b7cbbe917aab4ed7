#pragma once

#include <string>
#include <vector>

namespace rmdur {

// monthly pay rates over one span of the window; end is +inf when open
struct pay_segment {
  double start = 0.0;
  double end = 0.0;
  double lieutenant = 0.0;
  double captain = 0.0;
  double pension = 0.0;
};

// either one flat set of monthly rates (applied to the restricted means) or a
// piecewise schedule (integrated against the per-subject occupancy curves)
struct pay_schedule {
  double days_per_month = 30.4375;
  bool piecewise = false;
  double lieutenant = 0.0, captain = 0.0, pension = 0.0;
  std::vector<pay_segment> segments;
};

pay_schedule parse_schedule(const std::string& json_text);

struct means_row {
  std::string id;
  double lt = 0.0, cap = 0.0, rt = 0.0;
};
std::vector<means_row> parse_means_csv(const std::string& text);

struct curve_point {
  double t = 0.0, lt = 0.0, cap = 0.0, rt = 0.0;
};
struct subject_curve {
  std::string id;
  std::vector<curve_point> pts;
};
std::vector<subject_curve> parse_curves_csv(const std::string& text);

struct earnings_row {
  std::string id;
  double actual = 0.0;
};
std::vector<earnings_row> parse_earnings_csv(const std::string& text);

// damages csv: expected pay under the counterfactual minus observed earnings.
// flat schedules only need the means; piecewise schedules integrate rates
// against the occupancy curves, so curves must be supplied then.
std::string compute_damages(const pay_schedule& sch, const std::vector<means_row>& means,
                            const std::vector<subject_curve>& curves,
                            const std::vector<earnings_row>& earnings);

}  // namespace rmdur
