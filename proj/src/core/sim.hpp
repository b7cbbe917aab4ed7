#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/data.hpp"
#include "core/predict.hpp"

namespace rmdur {

// two exponential baseline hazards sharing an optional gamma frailty;
// promotion is terminated by retirement, both administratively censored by
// an independent uniform time
struct sim_config {
  int n = 500;
  int replicates = 1000;
  double lambda_p = 0.1;
  double lambda_r = 1.0 / 60.0;
  double beta1 = -0.5, beta2 = 0.1;   // promotion: protected flag, x2
  double theta1 = 0.5, theta2 = 0.1;  // retirement: protected flag, z2
  double censor_max = 200.0;
  double frailty_var = 0.0;  // gamma frailty variance (0: none)
  double tau = 5.0;          // restriction window is (0, tau]
  double policy_x2 = 1.0, policy_z2 = 1.0;  // evaluation covariates
  uint64_t seed = 1;
  int threads = 1;
};

sim_config sim_config_from_json(const std::string& text);
std::string sim_config_to_json(const sim_config& c);  // canonical form, digested

// one replicate as a dataset: covariates (x1,x2) / (x1,z2), both processes
// entering at 0, window (0, tau]
dataset generate_replicate(const sim_config& c, uint32_t rep);

// restricted means at the policy point from closed forms (gamma frailty
// integrates to (1+vs)^(-1/v) factors, which integrate in closed form too)
mean_result true_restricted_means(const sim_config& c);
// the same integrals by adaptive Simpson on the survival curves
mean_result quadrature_restricted_means(const sim_config& c);
// independent Monte Carlo check
mean_result mc_restricted_means(const sim_config& c, uint64_t seed, int64_t draws);

struct study_quantity {
  std::string name;
  double truth = 0.0;
  double mean_est = 0.0;
  double bias = 0.0;
  double esd = 0.0;  // sd of estimates across replicates
  double ase = 0.0;  // mean reported standard error
  double cp = 0.0;   // 1.96-interval coverage of the truth
};

struct sim_report {
  sim_config config;
  int used = 0;
  std::vector<int> excluded;  // replicate indices that failed to fit
  std::vector<std::string> exclusion_reasons;
  std::vector<study_quantity> rows;  // E_lt,E_cap,E_rt,beta1,beta2,theta1,theta2
  bool valid = false;                // exclusions within 1%
};

sim_report run_study(const sim_config& c);
std::string report_to_json(const sim_report& r);
std::string report_to_csv(const sim_report& r);

// synthetic promotion-roster example: staggered lieutenant dates around a
// fixed observation window, retirement eligibility at 25 years of service,
// time-varying tenure covariates, ISO dates at day resolution
void write_case_files(uint64_t seed, int n, const std::string& csv_path,
                      const std::string& sidecar_path);

}  // namespace rmdur
