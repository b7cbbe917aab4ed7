#pragma once

#include <limits>
#include <vector>

#include "core/data.hpp"

namespace rmdur {

enum class process_kind { promotion, retirement };

// counting-process layout for one transition across the dataset; rows keep a
// pointer into the owning dataset's trajectories, which must outlive the view.
// a subject is at risk at t when entry < t <= exit.
struct counting_view {
  int n = 0;  // rows (subjects contributing an observation of this process)
  int p = 0;  // covariates
  std::vector<double> entry, exit;
  std::vector<char> event;
  std::vector<const covariate_trajectory*> traj;
  std::vector<int> subject;     // index into dataset.subjects
  std::vector<double> etimes;   // distinct event times, ascending
  std::vector<int> ecount;      // tied events per time
  bool constant = false;        // every trajectory is a single segment
};

counting_view build_view(const dataset& ds, process_kind k);

// log partial likelihood (Breslow ties) with analytic gradient and observed
// information, evaluated at an arbitrary coefficient vector
struct pl_eval {
  double loglik = 0.0;
  std::vector<double> score;  // p
  std::vector<double> info;   // p*p, positive semidefinite
};
pl_eval eval_partial_likelihood(const counting_view& v, const std::vector<double>& beta);

struct cox_fit {
  std::vector<double> beta;         // p
  std::vector<double> hessian;      // p*p observed information at beta
  std::vector<double> hessian_inv;  // p*p
  std::vector<double> time;         // m distinct event times, ascending
  std::vector<int> dcount;          // events at each time
  std::vector<double> jump;         // Breslow baseline increments d/D
  std::vector<double> logD;         // log risk-set sum of exp(lp) at each time
  std::vector<double> xbar;         // m*p risk-set covariate means
  std::vector<double> resid;        // n*p score residuals (martingale form)
  bool converged = false;
  int iterations = 0;
  double score_norm = std::numeric_limits<double>::infinity();
};

// Newton-Raphson from zero with step halving (max 10 halvings, 50 iterations,
// convergence when the score sup-norm drops below 1e-8)
cox_fit fit_cox(const counting_view& v);

// dense per-event-time martingale increments dN - Y exp(lp) dLambda0 for one
// view row; mostly test support, the variance path recomputes these inline
std::vector<double> martingale_row(const counting_view& v, const cox_fit& f, int i);

}  // namespace rmdur
