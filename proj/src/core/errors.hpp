#pragma once

#include <stdexcept>
#include <string>

namespace rmdur {

// error taxonomy; the C API maps each type to a status code
struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct parse_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct validation_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// bad arguments: unknown columns, empty windows, trajectory not covering a
// requested time, tau0 >= tau1, subject outside the restriction window
struct domain_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct nonconvergence_error : std::runtime_error {
  nonconvergence_error(const std::string& msg, int iters, double snorm)
      : std::runtime_error(msg), iterations(iters), score_norm(snorm) {}
  int iterations;
  double score_norm;
};
// a coefficient ran away (|beta_j| > 50): partial likelihood is monotone
struct monotone_likelihood_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct singular_hessian_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace rmdur
