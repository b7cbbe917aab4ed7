#pragma once

#include <optional>
#include <string>
#include <vector>

#include "core/cox.hpp"
#include "core/data.hpp"
#include "core/stepfun.hpp"

namespace rmdur {

// covariate override applied before prediction: target_column is forced to
// replacement_value in both models wherever it appears
struct policy {
  std::string column;   // empty: use the dataset's protected column
  double value = 0.0;
};

struct mean_result {
  double lt = 0.0, cap = 0.0, rt = 0.0;
};

// one subject's counterfactual prediction inputs: trajectories with the
// override position (-1: none) and the two process entry times
struct target_spec {
  const covariate_trajectory* x = nullptr;
  int xcol = -1;
  double xval = 0.0;
  const covariate_trajectory* z = nullptr;
  int zcol = -1;
  double zval = 0.0;
  double p1 = 0.0;                // promotion entry
  std::optional<double> r1;      // retirement entry; absent: never eligible
};

// exp(beta' x(t)) with the override applied
double lp_rate(const std::vector<double>& beta, const covariate_trajectory& tr, int col,
               double val, double t);

// survival from fitted baseline + coefficients for one trajectory:
// S(t) = exp(-sum of jump(u) exp(beta' x(u)) over u in (entry, t])
step_curve survival_curve(const cox_fit& f, const covariate_trajectory& tr, int col, double val,
                          double entry, double horizon);

// both survival curves sampled on the merged knot grid over [a, tau1],
// a = max(tau0, p1)
struct target_curves {
  double a = 0.0, tau1 = 0.0;
  double p1 = 0.0, r1 = 0.0;
  bool has_r = false;             // retirement reachable inside the window
  std::vector<double> grid;      // {a, interior knots, tau1}
  std::vector<double> sp, sr;    // curve values at grid points
  step_curve SP, SR;
};

target_curves build_target_curves(const cox_fit& fp, const cox_fit& fr, const target_spec& t,
                                  const restriction_window& w);

// restricted mean time in each state over [a, tau1]; the three integrals are
// computed independently and partition tau1 - a
mean_result restricted_means(const target_curves& tc);

struct prediction_row {
  std::string id;
  mean_result mean;
  mean_result se;
};

struct prediction_output {
  std::vector<prediction_row> rows;
  std::string curves_csv;  // subject_id,time,p_lt,p_cap,p_rt
};

// full counterfactual pipeline over every subject with a promotion
// observation; rows are ordered as in the dataset regardless of threads
prediction_output run_prediction(const dataset& ds, const counting_view& vp,
                                 const counting_view& vr, const cox_fit& fp, const cox_fit& fr,
                                 const restriction_window& w, const policy& pol, int threads);

std::string means_csv(const std::vector<prediction_row>& rows);

}  // namespace rmdur
