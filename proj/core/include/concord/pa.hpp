#pragma once

#include <string>
#include <vector>

#include "concord/rng.hpp"
#include "concord/sample.hpp"

namespace concord {

/// Difference-scale parameters for the probability of agreement:
/// mu_d = mu_x - mu_y, sigma_d^2 = var_x + var_y - 2 cov_xy, and the
/// clinically acceptable difference c > 0.
struct PaSpec {
  double mu_d = 0.0;
  double sigma_d = 0.0;
  double c = 0.0;
};

PaSpec pa_spec_from_params(const BivariateNormalParams& p, double c);

/// psi_c = Phi((c - mu_d)/sigma_d) - Phi(-(c + mu_d)/sigma_d).
/// sigma_d = 0 is the point-mass case: 1 if |mu_d| <= c else 0.
double pa_normal(const PaSpec& spec);

struct PaCurve {
  std::vector<double> c_grid;
  std::vector<double> values;
  std::string provenance;  // where the parameters came from
};

/// Pointwise pa_normal over an ascending positive grid of c values.
PaCurve pa_curve(const BivariateNormalParams& p,
                 const std::vector<double>& c_grid,
                 const std::string& provenance = "params");

struct PaInference {
  AgreementEstimate estimate;
  bool interchangeable = false;  // psi_hat >= 0.95 guideline
  bool degenerate = false;       // point-mass fit (sigma_d = 0)
};

/// Plug-in psi_c from the ML fit with a parametric-bootstrap percentile CI
/// (b seeded refits of samples drawn from the fitted normal).
PaInference pa_inference(const PairedSample& sample, double c, double alpha,
                         int b, Rng& rng);

}  // namespace concord
