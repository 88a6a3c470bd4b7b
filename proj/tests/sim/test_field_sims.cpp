#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "concord/rng.hpp"
#include "concord/spatial.hpp"
#include "concord/stats_util.hpp"

using namespace concord;

TEST_CASE("simulate_field: empirical variogram tracks the model variogram") {
  SpatialModel m = make_exponential_model();
  m.var_x = 1.3;
  m.range_x = 2.0;
  m.range_y = 2.0;
  m.range_xy = 2.0;
  m.rho_co = 0.5;

  Rng rng(881);
  const int reps = 100;
  std::vector<double> gamma_hat(3, 0.0);
  for (int r = 0; r < reps; ++r) {
    const GridField f = simulate_field(m, 16, 16, 1.0, rng);
    for (int lag = 1; lag <= 3; ++lag)
      gamma_hat[lag - 1] +=
          empirical_semivariogram(f.x, 1.0, static_cast<double>(lag));
  }
  for (int lag = 1; lag <= 3; ++lag) {
    const double model_gamma = m.var_x - m.cov_x(static_cast<double>(lag));
    const double est = gamma_hat[lag - 1] / reps;
    CHECK(std::abs(est - model_gamma) / model_gamma < 0.10);
  }
}

TEST_CASE("spatial_pa: closed form matches field simulation frequencies") {
  SpatialModel m = make_matern_model(1.5, 1.5);
  m.mu_x = 0.1;
  m.mu_y = 0.0;
  m.var_x = 1.0;
  m.var_y = 1.2;
  m.range_x = m.range_y = m.range_xy = 2.5;
  m.rho_co = 0.6;
  const double c = 1.0;

  Rng rng(882);
  const int nx = 18, ny = 18, reps = 250;
  for (int lag : {1, 2}) {
    const double closed = spatial_pa(m, {static_cast<double>(lag), 0.0}, c);
    std::vector<double> proportions;
    proportions.reserve(reps);
    for (int r = 0; r < reps; ++r) {
      const GridField f = simulate_field(m, nx, ny, 1.0, rng);
      int hits = 0, total = 0;
      for (int i = 0; i < ny; ++i)
        for (int j = 0; j + lag < nx; ++j) {
          if (std::abs(f.x(i, j) - f.y(i, j + lag)) <= c) ++hits;
          ++total;
        }
      proportions.push_back(static_cast<double>(hits) / total);
    }
    const double est = mean_of(proportions);
    const double se = sd_of(proportions) / std::sqrt(double(reps));
    CHECK(std::abs(est - closed) < 3.0 * se + 1e-12);
  }
}

TEST_CASE("fit_bivariate_ml: median recovery error within 20% on 30x30") {
  SpatialModel truth = make_exponential_model();
  truth.mu_x = 1.0;
  truth.mu_y = 0.2;
  truth.var_x = 1.5;
  truth.var_y = 0.9;
  truth.range_x = 2.5;
  truth.range_y = 2.0;
  truth.range_xy = 2.25;
  truth.rho_co = 0.6;

  Rng rng(883);
  const int reps = 50;
  std::vector<double> err_vx, err_vy, err_rho;
  for (int r = 0; r < reps; ++r) {
    const GridField f = simulate_field(truth, 30, 30, 1.0, rng);
    const SpatialFit fit = fit_bivariate_ml(f, CovFamily::exponential);
    CHECK(fit.converged);
    err_vx.push_back(std::abs(fit.model.var_x - truth.var_x) / truth.var_x);
    err_vy.push_back(std::abs(fit.model.var_y - truth.var_y) / truth.var_y);
    err_rho.push_back(std::abs(fit.model.rho_co - truth.rho_co) / truth.rho_co);
  }
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
  };
  CHECK(median(err_vx) <= 0.20);
  CHECK(median(err_vy) <= 0.20);
  CHECK(median(err_rho) <= 0.20);
}

TEST_CASE("spatial_ccc_plugin: independent channels estimate near zero") {
  SpatialModel truth = make_exponential_model();
  truth.mu_x = 0.5;
  truth.mu_y = 0.0;
  truth.var_x = 1.2;
  truth.var_y = 0.9;
  truth.range_x = 2.0;
  truth.range_y = 2.5;
  truth.range_xy = 2.25;
  truth.rho_co = 0.0;

  Rng rng(884);
  double acc = 0.0;
  const int reps = 10;
  for (int r = 0; r < reps; ++r) {
    const GridField f = simulate_field(truth, 30, 30, 1.0, rng);
    const SpatialPluginEstimate est =
        spatial_ccc_plugin(f, CovFamily::exponential, {0.0, 0.0});
    acc += std::abs(est.estimate.estimate);
  }
  CHECK(acc / reps <= 0.1);
}
