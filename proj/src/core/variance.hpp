#pragma once

#include <vector>

#include "core/cox.hpp"
#include "core/predict.hpp"

namespace rmdur {

// per-sample-subject window integrals of the influence curves for one target,
// already scaled so that se_state = sqrt(sum over subjects of psi^2)
struct influence_result {
  std::vector<double> psi_lt, psi_cap, psi_rt;  // length = dataset n
  mean_result se;
};

influence_result influence(const target_spec& t, const target_curves& tc, int n,
                           const counting_view& vp, const cox_fit& fp, const counting_view& vr,
                           const cox_fit& fr);

// reference path for one sample subject: the four influence components as
// functions on the target grid, assembled literally from their definitions
// (A = H/n, S0 = D/n).  integrals match influence()'s psi entries.
struct influence_row {
  std::vector<double> xi1p, xi2p, xi1r, xi2r;  // values at tc.grid points
  double int_lt = 0.0, int_cap = 0.0, int_rt = 0.0;
};

influence_row influence_row_for(const target_spec& t, const target_curves& tc, int n,
                                const counting_view& vp, const cox_fit& fp,
                                const counting_view& vr, const cox_fit& fr, int subject);

}  // namespace rmdur
