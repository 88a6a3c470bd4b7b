#include "concord/spatial.hpp"

#include <cmath>
#include <utility>

#include "concord/errors.hpp"
#include "concord/mvn.hpp"
#include "concord/optim.hpp"
#include "concord/pa.hpp"

namespace concord {

double matern_correlation(double dist, double range, double smoothness) {
  if (dist < 0.0 || !(range > 0.0) || !(smoothness > 0.0))
    throw invalid_argument_error("matern_correlation: bad arguments");
  if (dist == 0.0) return 1.0;
  const double s = std::sqrt(2.0 * smoothness) * dist / range;
  if (smoothness == 0.5) return std::exp(-s);
  if (smoothness == 1.5) return (1.0 + s) * std::exp(-s);
  if (smoothness == 2.5) return (1.0 + s + s * s / 3.0) * std::exp(-s);
  return std::pow(2.0, 1.0 - smoothness) / std::tgamma(smoothness) *
         std::pow(s, smoothness) * std::cyl_bessel_k(smoothness, s);
}

double SpatialModel::cov_x(double dist) const {
  return var_x * matern_correlation(dist, range_x, smooth_x);
}

double SpatialModel::cov_y(double dist) const {
  return var_y * matern_correlation(dist, range_y, smooth_y);
}

double SpatialModel::cov_xy(double dist) const {
  return rho_co * std::sqrt(var_x * var_y) *
         matern_correlation(dist, range_xy, cross_smoothness());
}

SpatialModel make_exponential_model() { return SpatialModel{}; }

SpatialModel make_matern_model(double smooth_x, double smooth_y) {
  SpatialModel m;
  m.family = CovFamily::matern;
  m.smooth_x = smooth_x;
  m.smooth_y = smooth_y;
  return m;
}

double spatial_ccc(const SpatialModel& model, const Eigen::Vector2d& h) {
  const double denom = model.var_x + model.var_y +
                       (model.mu_x - model.mu_y) * (model.mu_x - model.mu_y);
  return 2.0 * model.cov_xy(h.norm()) / denom;
}

double spatial_pa(const SpatialModel& model, const Eigen::Vector2d& h,
                  double c) {
  PaSpec spec;
  spec.mu_d = model.mu_x - model.mu_y;
  const double v = model.var_x + model.var_y - 2.0 * model.cov_xy(h.norm());
  if (v < -1e-12 * (model.var_x + model.var_y))
    throw invalid_covariance_error("spatial_pa: negative sigma_D^2(h)");
  spec.sigma_d = std::sqrt(std::max(v, 0.0));
  spec.c = c;
  return pa_normal(spec);
}

namespace {

Eigen::MatrixXd site_distances(int nx, int ny, double spacing) {
  const int n = nx * ny;
  Eigen::MatrixXd d(n, n);
  for (int s = 0; s < n; ++s) {
    const double sx = (s % nx) * spacing;
    const double sy = (s / nx) * spacing;
    for (int t = s; t < n; ++t) {
      const double tx = (t % nx) * spacing;
      const double ty = (t / nx) * spacing;
      const double dist = std::hypot(sx - tx, sy - ty);
      d(s, t) = dist;
      d(t, s) = dist;
    }
  }
  return d;
}

Eigen::MatrixXd correlation_matrix(const Eigen::MatrixXd& dist, double range,
                                   double smoothness) {
  Eigen::MatrixXd r(dist.rows(), dist.cols());
  for (Eigen::Index j = 0; j < dist.cols(); ++j)
    for (Eigen::Index i = 0; i < dist.rows(); ++i)
      r(i, j) = matern_correlation(dist(i, j), range, smoothness);
  return r;
}

}  // namespace

Eigen::MatrixXd assemble_covariance(const SpatialModel& model, int nx, int ny,
                                    double spacing) {
  if (nx < 1 || ny < 1 || !(spacing > 0.0))
    throw invalid_argument_error("assemble_covariance: bad grid");
  const Eigen::MatrixXd dist = site_distances(nx, ny, spacing);
  const int n = nx * ny;
  Eigen::MatrixXd cov(2 * n, 2 * n);
  cov.topLeftCorner(n, n) =
      model.var_x * correlation_matrix(dist, model.range_x, model.smooth_x);
  cov.bottomRightCorner(n, n) =
      model.var_y * correlation_matrix(dist, model.range_y, model.smooth_y);
  const Eigen::MatrixXd cross =
      model.rho_co * std::sqrt(model.var_x * model.var_y) *
      correlation_matrix(dist, model.range_xy, model.cross_smoothness());
  cov.topRightCorner(n, n) = cross;
  cov.bottomLeftCorner(n, n) = cross.transpose();
  return cov;
}

bool model_valid(const SpatialModel& model, int nx, int ny, double spacing) {
  const Eigen::MatrixXd cov = assemble_covariance(model, nx, ny, spacing);
  return Eigen::LLT<Eigen::MatrixXd>(cov).info() == Eigen::Success;
}

double gaussian_loglik(const GridField& field, const SpatialModel& model) {
  const int n = field.sites();
  const Eigen::MatrixXd cov =
      assemble_covariance(model, field.nx, field.ny, field.spacing);
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success)
    throw invalid_covariance_error("gaussian_loglik: model covariance not PD");
  Eigen::VectorXd z(2 * n);
  for (int s = 0; s < n; ++s) {
    z[s] = field.x(s / field.nx, s % field.nx) - model.mu_x;
    z[n + s] = field.y(s / field.nx, s % field.nx) - model.mu_y;
  }
  double logdet = 0.0;
  for (int i = 0; i < 2 * n; ++i)
    logdet += 2.0 * std::log(llt.matrixL()(i, i));
  return -0.5 * (logdet + z.dot(llt.solve(z))) - n * std::log(2.0 * M_PI);
}

GridField simulate_field(const SpatialModel& model, int nx, int ny,
                         double spacing, Rng& rng, int site_budget) {
  const int n = nx * ny;
  if (n > site_budget)
    throw invalid_argument_error(
        "simulate_field: " + std::to_string(n) +
        " sites exceed the exact-Cholesky budget of " +
        std::to_string(site_budget) + " per channel");
  Eigen::VectorXd mean(2 * n);
  mean.head(n).setConstant(model.mu_x);
  mean.tail(n).setConstant(model.mu_y);
  Eigen::MatrixXd cov;
  try {
    cov = assemble_covariance(model, nx, ny, spacing);
  } catch (const error&) {
    throw;
  }
  MvnSampler sampler(mean, cov);  // throws invalid_covariance on bad models
  const Eigen::VectorXd draw = sampler.draw(rng);

  GridField field;
  field.nx = nx;
  field.ny = ny;
  field.spacing = spacing;
  field.x.resize(ny, nx);
  field.y.resize(ny, nx);
  for (int s = 0; s < n; ++s) {
    field.x(s / nx, s % nx) = draw[s];
    field.y(s / nx, s % nx) = draw[n + s];
  }
  return field;
}

namespace {

struct ProfileFit {
  double mu = 0.0;
  double var = 0.0;
  double range = 1.0;
  double profile_loglik = 0.0;
  bool converged = false;
  int evaluations = 0;
};

// Exact marginal ML for one channel: mu and var profiled analytically,
// range by grid scan + golden section on the log scale. The bracket spans
// a quarter grid step (white-noise side) to twice the domain extent.
ProfileFit fit_channel(const Eigen::VectorXd& z, const Eigen::MatrixXd& dist,
                       double smoothness, double spacing,
                       double domain_extent) {
  const int n = static_cast<int>(z.size());
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);

  struct Eval {
    double loglik;
    double mu;
    double var;
  };
  auto profile = [&](double log_range) -> Eval {
    const double range = std::exp(log_range);
    Eigen::MatrixXd r = correlation_matrix(dist, range, smoothness);
    Eigen::LLT<Eigen::MatrixXd> llt(r);
    if (llt.info() != Eigen::Success)
      return {-std::numeric_limits<double>::infinity(), 0.0, 0.0};
    const Eigen::VectorXd ri_one = llt.solve(ones);
    const double denom = ones.dot(ri_one);
    const double mu = z.dot(ri_one) / denom;
    const Eigen::VectorXd centered = z.array() - mu;
    const double qf = centered.dot(llt.solve(centered));
    const double var = qf / n;
    if (!(var > 0.0))
      return {-std::numeric_limits<double>::infinity(), mu, 0.0};
    double logdet = 0.0;
    for (int i = 0; i < n; ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i));
    const double loglik = -0.5 * (n * std::log(var) + logdet + n);
    return {loglik, mu, var};
  };

  const double lo = std::log(0.25 * spacing);
  const double hi = std::log(2.0 * domain_extent);
  ScalarMinResult res = grid_then_golden(
      [&](double lr) { return -profile(lr).loglik; }, lo, hi, 14, 1e-3);

  const Eval best = profile(res.x);
  ProfileFit fit;
  fit.mu = best.mu;
  fit.var = best.var;
  fit.range = std::exp(res.x);
  fit.profile_loglik = best.loglik;
  fit.converged = res.converged && std::isfinite(best.loglik);
  fit.evaluations = res.evaluations + 1;
  return fit;
}

}  // namespace

SpatialFit fit_bivariate_ml(const GridField& field, CovFamily family,
                            double smooth_x, double smooth_y) {
  const int n = field.sites();
  if (n > 2500)
    throw invalid_argument_error(
        "fit_bivariate_ml: grid exceeds the 2500-sites-per-channel budget");
  if (n < 4) throw insufficient_data_error("fit_bivariate_ml: grid too small");

  if (family == CovFamily::exponential) smooth_x = smooth_y = 0.5;

  Eigen::VectorXd zx(n), zy(n);
  for (int s = 0; s < n; ++s) {
    zx[s] = field.x(s / field.nx, s % field.nx);
    zy[s] = field.y(s / field.nx, s % field.nx);
  }

  SpatialFit out;
  out.model.family = family;
  out.model.smooth_x = smooth_x;
  out.model.smooth_y = smooth_y;

  // Constant channels have no spatial structure to fit.
  const double span_x = zx.maxCoeff() - zx.minCoeff();
  const double span_y = zy.maxCoeff() - zy.minCoeff();
  if (span_x == 0.0 || span_y == 0.0) {
    out.degenerate = true;
    out.model.mu_x = zx.mean();
    out.model.mu_y = zy.mean();
    out.model.var_x = (zx.array() - zx.mean()).square().mean();
    out.model.var_y = (zy.array() - zy.mean()).square().mean();
    out.model.rho_co = 0.0;
    return out;
  }

  const Eigen::MatrixXd dist = site_distances(field.nx, field.ny, field.spacing);
  const double extent = std::hypot((field.nx - 1) * field.spacing,
                                   (field.ny - 1) * field.spacing);

  if (zx == zy) {
    // Duplicated channels: the likelihood supremum sits at rho_co = 1 with
    // both marginals equal to the single-channel ML fit.
    const ProfileFit fz = fit_channel(zx, dist, smooth_x, field.spacing, extent);
    out.model.mu_x = out.model.mu_y = fz.mu;
    out.model.var_x = out.model.var_y = fz.var;
    out.model.range_x = out.model.range_y = out.model.range_xy = fz.range;
    out.model.smooth_y = smooth_x;
    out.model.rho_co = 1.0;
    out.log_likelihood = std::numeric_limits<double>::infinity();
    out.converged = fz.converged;
    out.evaluations = fz.evaluations;
    return out;
  }

  const ProfileFit fx = fit_channel(zx, dist, smooth_x, field.spacing, extent);
  const ProfileFit fy = fit_channel(zy, dist, smooth_y, field.spacing, extent);
  out.evaluations = fx.evaluations + fy.evaluations;

  out.model.mu_x = fx.mu;
  out.model.mu_y = fy.mu;
  out.model.var_x = fx.var;
  out.model.var_y = fy.var;
  out.model.range_x = fx.range;
  out.model.range_y = fy.range;
  out.model.range_xy = 0.5 * (fx.range + fy.range);

  // Cross stage: exact joint log-likelihood over rho_co via the Schur
  // complement S(rho) = Sy - rho^2 B^T Sx^{-1} B (B collects the unit-rho
  // cross block), so each candidate costs one n-size Cholesky.
  const Eigen::MatrixXd sx =
      fx.var * correlation_matrix(dist, fx.range, smooth_x);
  const Eigen::MatrixXd sy =
      fy.var * correlation_matrix(dist, fy.range, smooth_y);
  const Eigen::MatrixXd b =
      std::sqrt(fx.var * fy.var) *
      correlation_matrix(dist, out.model.range_xy,
                         0.5 * (smooth_x + smooth_y));

  Eigen::LLT<Eigen::MatrixXd> llt_x(sx);
  if (llt_x.info() != Eigen::Success)
    throw numeric_error("fit_bivariate_ml: marginal covariance not PD");
  double logdet_x = 0.0;
  for (int i = 0; i < n; ++i) logdet_x += 2.0 * std::log(llt_x.matrixL()(i, i));

  const Eigen::VectorXd u = zx.array() - fx.mu;
  const Eigen::VectorXd v = zy.array() - fy.mu;
  const Eigen::VectorXd sxi_u = llt_x.solve(u);
  const double qf_x = u.dot(sxi_u);
  const Eigen::VectorXd bt_sxi_u = b.transpose() * sxi_u;
  const Eigen::MatrixXd m = b.transpose() * llt_x.solve(b);

  auto joint_loglik = [&](double rho) -> double {
    const Eigen::MatrixXd s = sy - rho * rho * m;
    Eigen::LLT<Eigen::MatrixXd> llt_s(s);
    if (llt_s.info() != Eigen::Success)
      return -std::numeric_limits<double>::infinity();
    double logdet_s = 0.0;
    for (int i = 0; i < n; ++i)
      logdet_s += 2.0 * std::log(llt_s.matrixL()(i, i));
    const Eigen::VectorXd w = v - rho * bt_sxi_u;
    const double qf = qf_x + w.dot(llt_s.solve(w));
    return -0.5 * (logdet_x + logdet_s + qf) -
           n * std::log(2.0 * M_PI);
  };

  // optimize on the atanh scale; extend toward +-1 when the optimum sits at
  // the bracket edge (near-duplicate channels push rho_co to the boundary)
  auto neg_loglik_t = [&](double t) { return -joint_loglik(std::tanh(t)); };
  const double t_edge = std::atanh(0.99);
  ScalarMinResult cross =
      grid_then_golden(neg_loglik_t, -t_edge, t_edge, 15, 1e-4);
  if (std::abs(cross.x) > 0.98 * t_edge) {
    const double sign = cross.x > 0.0 ? 1.0 : -1.0;
    const double far = std::atanh(1.0 - 1e-9);
    ScalarMinResult extended = golden_section_min(
        neg_loglik_t, sign > 0 ? 0.98 * t_edge : -far,
        sign > 0 ? far : -0.98 * t_edge, 1e-4);
    extended.evaluations += cross.evaluations;
    if (extended.value < cross.value) cross = extended;
  }
  out.evaluations += cross.evaluations;
  out.model.rho_co = std::tanh(cross.x);
  out.log_likelihood = -cross.value;
  out.converged = fx.converged && fy.converged && cross.converged &&
                  std::isfinite(out.log_likelihood);
  if (!std::isfinite(out.log_likelihood))
    throw numeric_error("fit_bivariate_ml: no admissible parameters found");

  // Joint derivative-free polish from the staged estimate. The full
  // 2N-Cholesky per evaluation is affordable only on smaller grids; beyond
  // the cap the staged estimate is the reported ML fit.
  if (n <= 600) {
    GridField const& fld = field;
    auto neg_joint = [&](const std::vector<double>& q) -> double {
      SpatialModel m = out.model;
      m.mu_x = q[0];
      m.mu_y = q[1];
      m.var_x = std::exp(q[2]);
      m.var_y = std::exp(q[3]);
      m.range_x = std::exp(q[4]);
      m.range_y = std::exp(q[5]);
      m.range_xy = 0.5 * (m.range_x + m.range_y);
      m.rho_co = std::tanh(q[6]);
      try {
        return -gaussian_loglik(fld, m);
      } catch (const error&) {
        return std::numeric_limits<double>::infinity();
      }
    };
    std::vector<double> start{out.model.mu_x,
                              out.model.mu_y,
                              std::log(out.model.var_x),
                              std::log(out.model.var_y),
                              std::log(out.model.range_x),
                              std::log(out.model.range_y),
                              std::atanh(std::clamp(out.model.rho_co,
                                                    -1.0 + 1e-9, 1.0 - 1e-9))};
    const std::vector<double> step{0.05, 0.05, 0.1, 0.1, 0.15, 0.15, 0.1};
    const NelderMeadResult polish =
        nelder_mead(neg_joint, start, step, 1e-9, 400);
    out.evaluations += polish.evaluations;
    if (-polish.value > out.log_likelihood) {
      out.model.mu_x = polish.x[0];
      out.model.mu_y = polish.x[1];
      out.model.var_x = std::exp(polish.x[2]);
      out.model.var_y = std::exp(polish.x[3]);
      out.model.range_x = std::exp(polish.x[4]);
      out.model.range_y = std::exp(polish.x[5]);
      out.model.range_xy = 0.5 * (out.model.range_x + out.model.range_y);
      out.model.rho_co = std::tanh(polish.x[6]);
      out.log_likelihood = -polish.value;
    }
  }
  return out;
}

SpatialPluginEstimate spatial_ccc_plugin(const GridField& field,
                                         CovFamily family,
                                         const Eigen::Vector2d& h,
                                         double smooth_x, double smooth_y) {
  SpatialPluginEstimate out;
  out.fit = fit_bivariate_ml(field, family, smooth_x, smooth_y);
  const SpatialModel& m = out.fit.model;
  if (!(m.var_x > 0.0 && m.var_y > 0.0))
    throw degenerate_error("spatial_ccc_plugin: zero-variance channel");

  out.v = std::sqrt(m.var_x / m.var_y);
  out.u = (m.mu_x - m.mu_y) / std::pow(m.var_x * m.var_y, 0.25);
  out.eta = 2.0 / (out.v + 1.0 / out.v + out.u * out.u);
  out.rho_xy = m.cov_xy(h.norm()) / std::sqrt(m.var_x * m.var_y);

  out.estimate.estimate = out.eta * out.rho_xy;
  out.estimate.std_error = std::nan("");
  out.estimate.ci_low = std::nan("");
  out.estimate.ci_high = std::nan("");
  out.estimate.method = "ml-plugin";
  return out;
}

double empirical_cross_covariance(const GridField& field, int lag_x,
                                  int lag_y) {
  const double mean_x = field.x.mean();
  const double mean_y = field.y.mean();
  double acc = 0.0;
  int count = 0;
  for (int i = 0; i < field.ny; ++i) {
    for (int j = 0; j < field.nx; ++j) {
      const int ii = i + lag_y;
      const int jj = j + lag_x;
      if (ii < 0 || ii >= field.ny || jj < 0 || jj >= field.nx) continue;
      acc += (field.x(i, j) - mean_x) * (field.y(ii, jj) - mean_y);
      ++count;
    }
  }
  if (count == 0)
    throw invalid_argument_error("empirical_cross_covariance: lag outside grid");
  return acc / static_cast<double>(count);
}

double empirical_semivariogram(const Eigen::MatrixXd& channel, double spacing,
                               double dist, double tol) {
  const int ny = static_cast<int>(channel.rows());
  const int nx = static_cast<int>(channel.cols());
  double acc = 0.0;
  long count = 0;
  for (int i = 0; i < ny; ++i)
    for (int j = 0; j < nx; ++j)
      for (int ii = i; ii < ny; ++ii)
        for (int jj = (ii == i ? j + 1 : 0); jj < nx; ++jj) {
          const double d = spacing * std::hypot(ii - i, jj - j);
          if (std::abs(d - dist) > tol) continue;
          const double diff = channel(i, j) - channel(ii, jj);
          acc += diff * diff;
          ++count;
        }
  if (count == 0)
    throw invalid_argument_error("empirical_semivariogram: no pairs at lag");
  return 0.5 * acc / static_cast<double>(count);
}

}  // namespace concord
