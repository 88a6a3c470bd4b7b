// concord: agreement analysis for paired continuous measurements.
//
// Subcommands cover the classical indices (classic, calibrate), robust and
// probabilistic variants (robust, pa), time series (temporal), random
// vectors (mv), geostatistical fields (spatial), areal lattices (lattice),
// and images (image). Reports are JSON (default) or CSV, embed the full
// run configuration and seed, and are byte-identical across reruns.

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "concord/classic.hpp"
#include "concord/errors.hpp"
#include "concord/gmcar.hpp"
#include "concord/image.hpp"
#include "concord/io.hpp"
#include "concord/multivariate.hpp"
#include "concord/pa.hpp"
#include "concord/robust.hpp"
#include "concord/spatial.hpp"
#include "concord/stats_util.hpp"
#include "concord/temporal.hpp"
#include "concord/version.hpp"

using json = nlohmann::ordered_json;
using namespace concord;

namespace {

struct GlobalOptions {
  std::uint64_t seed = 20250801;
  std::string format = "json";
  std::string out_path;
};

std::uint64_t default_seed() {
  if (const char* env = std::getenv("CONCORD_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw config_error("CONCORD_SEED is not an unsigned integer");
    }
  }
  return 20250801;
}

void flatten_csv(const json& node, const std::string& prefix,
                 std::ostream& out) {
  if (node.is_object()) {
    for (const auto& [key, value] : node.items())
      flatten_csv(value, prefix.empty() ? key : prefix + "." + key, out);
  } else if (node.is_array()) {
    std::size_t i = 0;
    for (const auto& value : node)
      flatten_csv(value, prefix + "[" + std::to_string(i++) + "]", out);
  } else {
    out << prefix << "," << node.dump() << "\n";
  }
}

void emit_report(const json& report, const GlobalOptions& opts) {
  std::ostringstream body;
  if (opts.format == "csv") {
    body << "key,value\n";
    flatten_csv(report, "", body);
  } else {
    body << report.dump(2) << "\n";
  }
  if (opts.out_path.empty()) {
    std::cout << body.str();
  } else {
    std::ofstream out(opts.out_path, std::ios::binary);
    if (!out) throw config_error("cannot write output file: " + opts.out_path);
    out << body.str();
  }
}

json report_header(const std::string& command, const GlobalOptions& opts,
                   json config) {
  json report;
  report["command"] = command;
  report["version"] = version_string;
  report["seed"] = opts.seed;
  report["config"] = std::move(config);
  return report;
}

std::vector<double> parse_grid(const std::string& csv_list) {
  std::vector<double> grid;
  std::stringstream ss(csv_list);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      grid.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw config_error("bad grid value '" + tok + "'");
    }
  }
  if (grid.empty()) throw config_error("empty grid");
  return grid;
}

json inference_json(const FisherZInference& inf) {
  json j;
  j["estimate"] = inf.estimate;
  j["z"] = inf.z_hat;
  j["sigma_z"] = inf.sigma_z;
  j["ci_low"] = inf.ci_low;
  j["ci_high"] = inf.ci_high;
  j["alpha"] = inf.alpha;
  j["degenerate"] = inf.degenerate;
  j["used_bootstrap"] = inf.used_bootstrap;
  return j;
}

json estimate_json(const AgreementEstimate& est) {
  json j;
  j["estimate"] = est.estimate;
  j["std_error"] = est.std_error;
  j["ci_low"] = est.ci_low;
  j["ci_high"] = est.ci_high;
  j["alpha"] = est.alpha;
  j["method"] = est.method;
  return j;
}

json curve_json(const PaCurve& curve) {
  json j;
  j["c"] = curve.c_grid;
  j["psi"] = curve.values;
  j["provenance"] = curve.provenance;
  return j;
}

// ---------------------------------------------------------------- classic

void run_classic(const std::string& input, const std::string& col_x,
                 const std::string& col_y, double alpha, double multiplier,
                 const GlobalOptions& opts) {
  const IngestResult in = ingest_pairs(input, col_x, col_y);
  const SampleMoments m = summarize(in.sample, DivisorMode::unbiased);
  const BivariateNormalFit fit = fit_bivariate_normal(in.sample);

  json config{{"input", input},     {"x", col_x},
              {"y", col_y},         {"alpha", alpha},
              {"loa_multiplier", multiplier}};
  json report = report_header("classic", opts, config);
  report["n"] = in.sample.n();
  report["dropped_rows"] = in.dropped;
  report["moments"] = {{"mean_x", m.mean_x}, {"mean_y", m.mean_y},
                       {"var_x", m.var_x},   {"var_y", m.var_y},
                       {"cov_xy", m.cov_xy}};
  report["pearson"] = pearson(m);
  report["ccc"] = inference_json(ccc_inference(in.sample, alpha,
                                               Rng(opts.seed)));
  const CccDecomposition d = ccc_decompose(fit.params);
  report["decomposition"] = {{"rho", d.rho},
                             {"c_b", d.c_b},
                             {"scale_ratio_v", d.v},
                             {"location_shift_u", d.u}};
  const double mse = mean_squared_error(in.sample);
  report["mse"] = mse;
  if (fit.params.cov_xy != 0.0)
    report["ccc_from_mse"] = ccc_from_mse(mse, fit.params.cov_xy);

  const LimitsOfAgreement loa = bland_altman(in.sample, multiplier);
  report["limits_of_agreement"] = {{"mean_diff", loa.mean_diff},
                                   {"sd_diff", loa.sd_diff},
                                   {"lower", loa.lower},
                                   {"upper", loa.upper},
                                   {"multiplier", loa.coverage_multiplier}};
  report["bland_altman_series"] = {{"mean", loa.pair_means},
                                   {"diff", loa.pair_diffs}};
  emit_report(report, opts);
}

// ----------------------------------------------------------------- robust

void run_robust(const std::string& input, const std::string& col_x,
                const std::string& col_y, const std::string& family,
                double delta, double cap, int bootstrap, double alpha,
                const GlobalOptions& opts) {
  const IngestResult in = ingest_pairs(input, col_x, col_y);

  DistanceFunction g = DistanceFunction::absolute();
  if (family == "power")
    g = DistanceFunction::power(delta);
  else if (family == "winsorized")
    g = DistanceFunction::winsorized_power(delta, cap);
  else if (family == "squared")
    g = DistanceFunction::squared();
  else if (family == "absolute")
    g = DistanceFunction::absolute();
  else
    throw config_error("unknown distance family '" + family + "'");

  json config{{"input", input},   {"x", col_x},       {"y", col_y},
              {"family", family}, {"delta", delta},   {"cap", cap},
              {"bootstrap", bootstrap}, {"alpha", alpha}};
  json report = report_header("robust", opts, config);
  report["n"] = in.sample.n();
  report["dropped_rows"] = in.dropped;
  report["rho_g"] = rho_g_sample(in.sample, g);

  // delta presets reported alongside the requested function
  report["rho_g_presets"] = {
      {"delta_1.0", rho_g_sample(in.sample, DistanceFunction::power(1.0))},
      {"delta_1.5", rho_g_sample(in.sample, DistanceFunction::power(1.5))}};

  const BivariateNormalFit fit = fit_bivariate_normal(in.sample);
  report["rho1_normal"] = rho1_normal(fit.params);

  if (bootstrap > 0) {
    Rng rng(opts.seed);
    std::vector<double> stats;
    stats.reserve(bootstrap);
    const std::size_t n = in.sample.n();
    std::vector<double> bx(n), by(n);
    for (int rep = 0; rep < bootstrap; ++rep) {
      Rng task = rng.derive(rep);
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t k = task.uniform_below(n);
        bx[i] = in.sample.x()[k];
        by[i] = in.sample.y()[k];
      }
      try {
        stats.push_back(rho_g_sample(PairedSample(bx, by), g));
      } catch (const error&) {
      }
    }
    std::sort(stats.begin(), stats.end());
    json ci;
    ci["ci_low"] = quantile_sorted(stats, alpha / 2.0);
    ci["ci_high"] = quantile_sorted(stats, 1.0 - alpha / 2.0);
    ci["resamples"] = stats.size();
    ci["method"] = "nonparametric-bootstrap";
    report["rho_g_bootstrap"] = ci;
  }
  emit_report(report, opts);
}

// --------------------------------------------------------------------- pa

void run_pa(const std::string& input, const std::string& col_x,
            const std::string& col_y, double cad, double alpha, int bootstrap,
            const std::string& c_grid, const GlobalOptions& opts) {
  const IngestResult in = ingest_pairs(input, col_x, col_y);
  const SampleMoments m = summarize(in.sample, DivisorMode::unbiased);

  std::string cad_provenance = "user";
  if (cad <= 0.0) {
    // heuristic default: one SD of the reference (y) channel
    cad = std::sqrt(m.var_y);
    cad_provenance = "sd-of-reference-heuristic";
  }
  if (cad <= 0.0) throw config_error("cannot derive a positive CAD");

  json config{{"input", input}, {"x", col_x},     {"y", col_y},
              {"cad", cad},     {"alpha", alpha}, {"bootstrap", bootstrap}};
  json report = report_header("pa", opts, config);
  report["n"] = in.sample.n();
  report["dropped_rows"] = in.dropped;
  report["cad"] = cad;
  report["cad_provenance"] = cad_provenance;

  Rng rng(opts.seed);
  const PaInference inf = pa_inference(in.sample, cad, alpha, bootstrap, rng);
  report["psi"] = estimate_json(inf.estimate);
  report["interchangeable"] = inf.interchangeable;
  report["guideline"] = 0.95;
  report["degenerate"] = inf.degenerate;

  if (!c_grid.empty()) {
    const BivariateNormalFit fit = fit_bivariate_normal(in.sample);
    report["pa_curve"] =
        curve_json(pa_curve(fit.params, parse_grid(c_grid), "ml-fit"));
  }
  emit_report(report, opts);
}

// ---------------------------------------------------------------- temporal

void run_temporal(const std::string& input, const std::string& mode,
                  const std::string& col_x, const std::string& col_y,
                  const std::string& col_subject, const std::string& col_time,
                  std::size_t block_len, int bootstrap, double alpha,
                  const std::string& kernel_name, double bandwidth,
                  const GlobalOptions& opts) {
  json config{{"input", input},       {"mode", mode},
              {"x", col_x},           {"y", col_y},
              {"subject", col_subject}, {"time", col_time},
              {"block_len", block_len}, {"bootstrap", bootstrap},
              {"alpha", alpha},       {"kernel", kernel_name},
              {"bandwidth", bandwidth}};
  json report = report_header("temporal", opts, config);

  if (mode == "comovement") {
    const IngestResult in = ingest_pairs(input, col_x, col_y);
    SeriesPair pair(in.sample.x(), in.sample.y());
    report["n"] = pair.length();
    report["dropped_rows"] = in.dropped;
    report["comovement"] = comovement(pair);
    if (bootstrap > 0) {
      const std::size_t len =
          block_len > 0 ? block_len : default_block_length(pair.length());
      Rng rng(opts.seed);
      report["block_len"] = len;
      report["comovement_bootstrap"] = estimate_json(
          comovement_block_bootstrap(pair, len, bootstrap, alpha, rng));
    }
  } else if (mode == "functional") {
    const CsvTable table = read_csv(input);
    const std::size_t is = table.column_index(col_subject);
    const std::size_t it = table.column_index(col_time);
    const std::size_t ix = table.column_index(col_x);
    const std::size_t iy = table.column_index(col_y);

    // long format -> subject-by-time panels on the common grid
    std::map<double, std::map<double, std::pair<double, double>>> cells;
    std::set<double> time_set;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      const double vs = table.numeric(r, is);
      const double vt = table.numeric(r, it);
      const double vx = table.numeric(r, ix);
      const double vy = table.numeric(r, iy);
      if (std::isnan(vs) || std::isnan(vt) || std::isnan(vx) || std::isnan(vy))
        continue;
      cells[vs][vt] = {vx, vy};
      time_set.insert(vt);
    }
    std::vector<double> times(time_set.begin(), time_set.end());
    const std::size_t n = cells.size(), N = times.size();
    if (n < 2) throw insufficient_data_error("functional mode needs >= 2 subjects");
    Eigen::MatrixXd x(n, N), y(n, N);
    std::size_t i = 0;
    for (const auto& [subject, series] : cells) {
      for (std::size_t j = 0; j < N; ++j) {
        const auto found = series.find(times[j]);
        if (found == series.end())
          throw invalid_data_error(
              "subject " + std::to_string(subject) +
              " is missing time point " + std::to_string(times[j]));
        x(i, j) = found->second.first;
        y(i, j) = found->second.second;
      }
      ++i;
    }
    const LongitudinalSample data(times, x, y);
    const Kernel kernel = kernel_name == "epanechnikov"
                              ? Kernel::epanechnikov
                              : Kernel::gaussian;
    const double h = bandwidth > 0.0 ? bandwidth : silverman_bandwidth(times);
    const WeightFunction w = kernel_weights(times, kernel, h);
    const FunctionalCcc ccc = functional_ccc(data, w);
    report["subjects"] = n;
    report["time_points"] = N;
    report["bandwidth"] = h;
    report["functional_ccc"] = ccc.value;
    report["functional_ccc_raw"] = ccc.raw;
    report["weights"] = {{"t", times}, {"w", w.values}};
  } else {
    throw config_error("temporal mode must be comovement or functional");
  }
  emit_report(report, opts);
}

// --------------------------------------------------------------------- mv

void run_mv(const std::string& input, const std::string& x_cols,
            const std::string& y_cols, const std::string& weights_path,
            const GlobalOptions& opts) {
  const CsvTable table = read_csv(input);
  std::vector<std::size_t> xi, yi;
  {
    std::stringstream sx(x_cols), sy(y_cols);
    std::string tok;
    while (std::getline(sx, tok, ',')) xi.push_back(table.column_index(tok));
    while (std::getline(sy, tok, ',')) yi.push_back(table.column_index(tok));
  }
  if (xi.empty() || xi.size() != yi.size())
    throw config_error("mv needs matching nonempty --x-cols/--y-cols lists");

  const Eigen::Index p = static_cast<Eigen::Index>(xi.size());
  std::vector<Eigen::VectorXd> xs, ys;
  std::size_t dropped = 0;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    Eigen::VectorXd vx(p), vy(p);
    bool complete = true;
    for (Eigen::Index k = 0; k < p; ++k) {
      vx[k] = table.numeric(r, xi[static_cast<std::size_t>(k)]);
      vy[k] = table.numeric(r, yi[static_cast<std::size_t>(k)]);
      if (std::isnan(vx[k]) || std::isnan(vy[k])) complete = false;
    }
    if (!complete) {
      ++dropped;
      continue;
    }
    xs.push_back(vx);
    ys.push_back(vy);
  }
  const VectorPairSample sample(xs, ys);

  json config{{"input", input},
              {"x_cols", x_cols},
              {"y_cols", y_cols},
              {"weights", weights_path}};
  json report = report_header("mv", opts, config);
  report["n"] = sample.n();
  report["p"] = p;
  report["dropped_rows"] = dropped;

  const MatrixCccSample mc = matrix_ccc_sample(sample);
  report["matrix_ccc"] = mc.ccc.value;
  report["matrix_ccc_below_minus_one"] = mc.ccc.below_minus_one;

  // moment-based plug-in for the repeated-measures coefficient
  MvParams params;
  params.mu_x = Eigen::VectorXd::Zero(p);
  params.mu_y = Eigen::VectorXd::Zero(p);
  params.sigma_x = Eigen::MatrixXd::Zero(p, p);
  params.sigma_y = Eigen::MatrixXd::Zero(p, p);
  params.sigma_xy = Eigen::MatrixXd::Zero(p, p);
  const double nn = static_cast<double>(sample.n());
  for (const auto& v : xs) params.mu_x += v / nn;
  for (const auto& v : ys) params.mu_y += v / nn;
  for (std::size_t i = 0; i < sample.n(); ++i) {
    const Eigen::VectorXd dx = xs[i] - params.mu_x;
    const Eigen::VectorXd dy = ys[i] - params.mu_y;
    params.sigma_x += dx * dx.transpose() / nn;
    params.sigma_y += dy * dy.transpose() / nn;
    params.sigma_xy += dx * dy.transpose() / nn;
  }
  WeightMatrix d = WeightMatrix::identity(p);
  if (!weights_path.empty()) {
    const GridChannel w = read_grid_channel(weights_path);
    d = WeightMatrix(w.values);
  }
  report["rm_ccc"] = rm_ccc(params, d);
  emit_report(report, opts);
}

// ---------------------------------------------------------------- spatial

void run_spatial(const std::string& x_path, const std::string& y_path,
                 double spacing, const std::string& family_name,
                 double smooth_x, double smooth_y, const std::string& lags,
                 double cad, const GlobalOptions& opts) {
  const GridChannel cx = read_grid_channel(x_path);
  const GridChannel cy = read_grid_channel(y_path);
  if (cx.values.rows() != cy.values.rows() ||
      cx.values.cols() != cy.values.cols())
    throw config_error("spatial: channel grids have different shapes");

  GridField field;
  field.ny = static_cast<int>(cx.values.rows());
  field.nx = static_cast<int>(cx.values.cols());
  field.spacing = spacing > 0.0 ? spacing
                  : cx.spacing.has_value() ? *cx.spacing
                                           : 1.0;
  field.x = cx.values;
  field.y = cy.values;

  CovFamily family = CovFamily::exponential;
  if (family_name == "matern")
    family = CovFamily::matern;
  else if (family_name != "exponential")
    throw config_error("family must be exponential or matern");

  json config{{"x_grid", x_path},   {"y_grid", y_path},
              {"spacing", field.spacing}, {"family", family_name},
              {"smooth_x", smooth_x},     {"smooth_y", smooth_y},
              {"lags", lags},             {"cad", cad}};
  json report = report_header("spatial", opts, config);
  report["sites_per_channel"] = field.sites();

  const SpatialFit fit = fit_bivariate_ml(field, family, smooth_x, smooth_y);
  report["fit"] = {{"mu_x", fit.model.mu_x},
                   {"mu_y", fit.model.mu_y},
                   {"var_x", fit.model.var_x},
                   {"var_y", fit.model.var_y},
                   {"range_x", fit.model.range_x},
                   {"range_y", fit.model.range_y},
                   {"range_xy", fit.model.range_xy},
                   {"rho_co", fit.model.rho_co},
                   {"log_likelihood", fit.log_likelihood},
                   {"converged", fit.converged},
                   {"degenerate", fit.degenerate},
                   {"evaluations", fit.evaluations}};

  if (cad <= 0.0) cad = std::sqrt(fit.model.var_x);
  report["cad"] = cad;

  json per_lag = json::array();
  for (double lag : parse_grid(lags)) {
    const Eigen::Vector2d h(lag * field.spacing, 0.0);
    json entry;
    entry["lag"] = lag;
    entry["sccc"] = spatial_ccc(fit.model, h);
    entry["psi"] = spatial_pa(fit.model, h, cad);
    const int steps = static_cast<int>(lag);
    if (std::abs(lag - steps) < 1e-12 && steps < field.nx)
      entry["empirical_cross_cov"] =
          empirical_cross_covariance(field, steps, 0);
    per_lag.push_back(entry);
  }
  report["per_lag"] = per_lag;

  // accuracy components of the plug-in at lag zero
  const SpatialModel& m = fit.model;
  const double v = std::sqrt(m.var_x / m.var_y);
  const double u = (m.mu_x - m.mu_y) / std::pow(m.var_x * m.var_y, 0.25);
  report["plugin_components"] = {{"eta", 2.0 / (v + 1.0 / v + u * u)},
                                 {"v", v},
                                 {"u", u}};
  emit_report(report, opts);
}

// ---------------------------------------------------------------- lattice

void run_lattice(const std::string& edges_path, long n_nodes, double rho1,
                 double rho2, double eta0, double eta1, double tau1,
                 double tau2, const std::string& mu1_path,
                 const std::string& mu2_path, const GlobalOptions& opts) {
  const auto edges = read_edge_list(edges_path);
  long n = n_nodes;
  if (n <= 0) {
    for (const auto& [a, b] : edges) n = std::max({n, long(a) + 1, long(b) + 1});
  }
  if (n <= 0) throw config_error("lattice: could not infer node count");

  LatticeSpec spec;
  spec.w1 = adjacency_from_edges(n, edges);
  spec.rho1 = rho1;
  spec.rho2 = rho2;
  spec.eta0 = eta0;
  spec.eta1 = eta1;
  spec.tau1 = tau1;
  spec.tau2 = tau2;
  spec.mu1 = Eigen::VectorXd::Zero(n);
  spec.mu2 = Eigen::VectorXd::Zero(n);
  auto load_mu = [n](const std::string& path) {
    const GridChannel ch = read_grid_channel(path);
    Eigen::VectorXd mu(ch.values.size());
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < ch.values.rows(); ++i)
      for (Eigen::Index j = 0; j < ch.values.cols(); ++j)
        mu[k++] = ch.values(i, j);
    if (mu.size() != n)
      throw config_error("mean vector length does not match node count");
    return mu;
  };
  if (!mu1_path.empty()) spec.mu1 = load_mu(mu1_path);
  if (!mu2_path.empty()) spec.mu2 = load_mu(mu2_path);

  json config{{"edges", edges_path}, {"n", n},       {"rho1", rho1},
              {"rho2", rho2},        {"eta0", eta0}, {"eta1", eta1},
              {"tau1", tau1},        {"tau2", tau2}, {"mu1", mu1_path},
              {"mu2", mu2_path}};
  json report = report_header("lattice", opts, config);

  const GmcarCovariance cov = gmcar_covariance(spec);
  report["lattice_ccc"] = lattice_ccc(spec);
  report["block_sums"] = {{"s11", cov.s11.sum()},
                          {"s12", cov.s12.sum()},
                          {"s22", cov.s22.sum()}};
  emit_report(report, opts);
}

// ------------------------------------------------------------------ image

void run_image(const std::string& a_path, const std::string& b_path,
               const std::string& c_grid, bool table1, int seeds,
               const std::string& mode_name, const std::string& deltas,
               const std::string& ba_series_path, const GlobalOptions& opts) {
  json config{{"a", a_path},         {"b", b_path},
              {"c_grid", c_grid},    {"table1", table1},
              {"seeds", seeds},      {"mode", mode_name},
              {"deltas", deltas},    {"ba_series", ba_series_path}};
  json report = report_header("image", opts, config);

  const ContaminationMode mode = mode_name == "additive"
                                     ? ContaminationMode::additive
                                     : ContaminationMode::replace;
  if (mode_name != "additive" && mode_name != "replace")
    throw config_error("mode must be additive or replace");
  if (!table1 && b_path.empty())
    throw config_error("image: --b is required unless --table1 is given");

  if (table1) {
    const Image original = load_image(a_path);
    Rng rng(opts.seed);
    const auto rows =
        contamination_study(original, parse_grid(deltas), seeds, mode,
                            parse_grid(c_grid), rng);
    json out = json::array();
    for (const auto& row : rows) {
      json entry;
      entry["delta"] = row.delta;
      entry["pearson"] = row.pearson;
      entry["ccc"] = row.ccc;
      entry["ssim"] = row.ssim;
      entry["pa_curve"] = curve_json(row.pa);
      out.push_back(entry);
    }
    report["contamination_study"] = out;
    emit_report(report, opts);
    return;
  }

  const Image a = load_image(a_path);
  const Image b = load_image(b_path);
  const ImageAgreementReport rep = agreement_report(a, b, parse_grid(c_grid));
  report["pearson"] = rep.pearson;
  report["ccc"] = rep.ccc;
  report["ssim"] = {{"value", rep.ssim.value},
                    {"luminance", rep.ssim.luminance},
                    {"contrast", rep.ssim.contrast},
                    {"structure", rep.ssim.structure}};
  report["pa_curve"] = curve_json(rep.pa);
  report["limits_of_agreement"] = {{"mean_diff", rep.loa.mean_diff},
                                   {"sd_diff", rep.loa.sd_diff},
                                   {"lower", rep.loa.lower},
                                   {"upper", rep.loa.upper}};
  if (!ba_series_path.empty()) {
    std::ofstream series(ba_series_path);
    if (!series)
      throw config_error("cannot write series file: " + ba_series_path);
    series << "mean,diff\n";
    for (std::size_t i = 0; i < rep.loa.pair_means.size(); ++i)
      series << rep.loa.pair_means[i] << "," << rep.loa.pair_diffs[i] << "\n";
    report["ba_series_written"] = ba_series_path;
  }
  emit_report(report, opts);
}

// -------------------------------------------------------------- calibrate

void run_calibrate(const std::string& input, const std::string& col_x,
                   const std::string& col_y, double alpha, double cad,
                   int bootstrap, const GlobalOptions& opts) {
  const IngestResult in = ingest_pairs(input, col_x, col_y);
  const CalibrationReport cal =
      calibrate_and_agree(in.sample, alpha, Rng(opts.seed));

  std::string cad_provenance = "user";
  if (cad <= 0.0) {
    const SampleMoments m = summarize(in.sample, DivisorMode::unbiased);
    cad = std::sqrt(m.var_y);  // SD of the reference channel
    cad_provenance = "sd-of-reference-heuristic";
  }

  json config{{"input", input}, {"x", col_x},     {"y", col_y},
              {"alpha", alpha}, {"cad", cad},     {"bootstrap", bootstrap}};
  json report = report_header("calibrate", opts, config);
  report["n"] = cal.n;
  report["dropped_rows"] = in.dropped;
  report["intercept"] = cal.intercept;
  report["slope"] = cal.slope;
  report["r2"] = cal.r2;
  report["r2_adj"] = cal.r2_adj;
  report["ccc"] = inference_json(cal.ccc);
  report["cad"] = cad;
  report["cad_provenance"] = cad_provenance;

  Rng rng(opts.seed);
  const PaInference pa = pa_inference(PairedSample(in.sample.y(), cal.predicted),
                                      cad, alpha, bootstrap, rng);
  report["pa"] = estimate_json(pa.estimate);
  report["interchangeable"] = pa.interchangeable;
  emit_report(report, opts);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"concord: agreement coefficients for continuous data"};
  app.require_subcommand(1);
  app.fallthrough();  // accept global flags after the subcommand too

  GlobalOptions opts;
  try {
    opts.seed = default_seed();
  } catch (const config_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  app.add_option("--seed", opts.seed, "RNG seed (env CONCORD_SEED fallback)");
  app.add_option("--format", opts.format, "Report format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--out", opts.out_path, "Output path (default stdout)");

  // classic
  auto* classic = app.add_subcommand(
      "classic", "Pearson, Lin CCC with Fisher-z CI, Bland-Altman limits");
  std::string input, col_x = "0", col_y = "1";
  double alpha = 0.05, loa_multiplier = 1.96;
  classic->add_option("--input", input, "CSV input")->required();
  classic->add_option("--x", col_x, "x column (name or index)");
  classic->add_option("--y", col_y, "y column (name or index)");
  classic->add_option("--alpha", alpha, "CI level complement");
  classic->add_option("--loa-multiplier", loa_multiplier,
                      "limits-of-agreement multiplier");

  // robust
  auto* robust = app.add_subcommand(
      "robust", "Distance-based robust agreement (rho_g, rho_1)");
  std::string r_input, r_x = "0", r_y = "1", family = "power";
  double delta = 1.0, cap = 3.0, r_alpha = 0.05;
  int r_bootstrap = 0;
  robust->add_option("--input", r_input, "CSV input")->required();
  robust->add_option("--x", r_x, "x column");
  robust->add_option("--y", r_y, "y column");
  robust->add_option("--family", family,
                     "power | winsorized | squared | absolute");
  robust->add_option("--delta", delta, "power exponent");
  robust->add_option("--cap", cap, "winsorization cap z0");
  robust->add_option("--bootstrap", r_bootstrap, "bootstrap resamples (0 off)");
  robust->add_option("--alpha", r_alpha, "bootstrap CI level complement");

  // pa
  auto* pa_cmd = app.add_subcommand("pa", "Probability of agreement");
  std::string p_input, p_x = "0", p_y = "1", p_grid;
  double p_cad = 0.0, p_alpha = 0.05;
  int p_bootstrap = 2000;
  pa_cmd->add_option("--input", p_input, "CSV input")->required();
  pa_cmd->add_option("--x", p_x, "x column");
  pa_cmd->add_option("--y", p_y, "y column");
  pa_cmd->add_option("--cad", p_cad,
                     "clinically acceptable difference (default: SD of y)");
  pa_cmd->add_option("--alpha", p_alpha, "CI level complement");
  pa_cmd->add_option("--bootstrap", p_bootstrap, "parametric resamples");
  pa_cmd->add_option("--c-grid", p_grid, "comma list for the PA curve");

  // temporal
  auto* temporal = app.add_subcommand(
      "temporal", "Comovement and functional CCC for time series");
  std::string t_input, t_mode = "comovement", t_x = "0", t_y = "1";
  std::string t_subject = "subject", t_time = "time", t_kernel = "gaussian";
  std::size_t t_block = 0;
  int t_bootstrap = 1000;
  double t_alpha = 0.05, t_bandwidth = 0.0;
  temporal->add_option("--input", t_input, "CSV input")->required();
  temporal->add_option("--mode", t_mode, "comovement | functional");
  temporal->add_option("--x", t_x, "x column");
  temporal->add_option("--y", t_y, "y column");
  temporal->add_option("--subject", t_subject, "subject column (functional)");
  temporal->add_option("--time", t_time, "time column (functional)");
  temporal->add_option("--block-len", t_block,
                       "bootstrap block length (default length^(1/3))");
  temporal->add_option("--bootstrap", t_bootstrap, "resamples (0 off)");
  temporal->add_option("--alpha", t_alpha, "CI level complement");
  temporal->add_option("--kernel", t_kernel, "gaussian | epanechnikov");
  temporal->add_option("--bandwidth", t_bandwidth,
                       "kernel bandwidth (default Silverman)");

  // mv
  auto* mv = app.add_subcommand(
      "mv", "Vector agreement: repeated-measures and matrix CCC");
  std::string m_input, m_x_cols, m_y_cols, m_weights;
  mv->add_option("--input", m_input, "CSV input")->required();
  mv->add_option("--x-cols", m_x_cols, "comma list of x columns")->required();
  mv->add_option("--y-cols", m_y_cols, "comma list of y columns")->required();
  mv->add_option("--weights", m_weights, "p x p weight matrix file (D)");

  // spatial
  auto* spatial = app.add_subcommand(
      "spatial", "Geostatistical agreement: SCCC and spatial PA");
  std::string s_x, s_y, s_family = "exponential", s_lags = "0,1,2";
  double s_spacing = 0.0, s_smooth_x = 1.5, s_smooth_y = 1.5, s_cad = 0.0;
  spatial->add_option("--x-grid", s_x, "x channel grid file")->required();
  spatial->add_option("--y-grid", s_y, "y channel grid file")->required();
  spatial->add_option("--spacing", s_spacing, "grid spacing override");
  spatial->add_option("--family", s_family, "exponential | matern");
  spatial->add_option("--smooth-x", s_smooth_x, "matern smoothness (x)");
  spatial->add_option("--smooth-y", s_smooth_y, "matern smoothness (y)");
  spatial->add_option("--lags", s_lags, "comma list of lags (grid steps)");
  spatial->add_option("--cad", s_cad,
                      "acceptable difference (default: fitted SD of x)");

  // lattice
  auto* lattice = app.add_subcommand(
      "lattice", "GMCAR lattice concordance from an adjacency and parameters");
  std::string l_edges, l_mu1, l_mu2;
  long l_n = 0;
  double l_rho1 = 0.0, l_rho2 = 0.0, l_eta0 = 0.0, l_eta1 = 0.0;
  double l_tau1 = 1.0, l_tau2 = 1.0;
  lattice->add_option("--edges", l_edges, "edge-list CSV")->required();
  lattice->add_option("--n", l_n, "node count (default: 1 + max id)");
  lattice->add_option("--rho1", l_rho1, "spatial autocorrelation 1");
  lattice->add_option("--rho2", l_rho2, "spatial autocorrelation 2");
  lattice->add_option("--eta0", l_eta0, "linking parameter eta0");
  lattice->add_option("--eta1", l_eta1, "linking parameter eta1");
  lattice->add_option("--tau1", l_tau1, "precision tau1");
  lattice->add_option("--tau2", l_tau2, "precision tau2");
  lattice->add_option("--mu1", l_mu1, "mean vector file (channel 1)");
  lattice->add_option("--mu2", l_mu2, "mean vector file (channel 2)");

  // image
  auto* image = app.add_subcommand(
      "image", "Image agreement report and contamination study");
  std::string i_a, i_b, i_grid = "0.05,0.1,0.2,0.3", i_mode = "replace";
  std::string i_deltas = "0.01,0.05,0.15,0.25", i_series;
  bool i_table1 = false;
  int i_seeds = 20;
  image->add_option("--a", i_a, "reference image")->required();
  image->add_option("--b", i_b, "comparison image");
  image->add_option("--c-grid", i_grid, "PA curve grid");
  image->add_flag("--table1", i_table1,
                  "run the seeded contamination study on --a");
  image->add_option("--seeds", i_seeds, "seeds per contamination level");
  image->add_option("--mode", i_mode, "contamination: additive | replace");
  image->add_option("--deltas", i_deltas, "contamination levels");
  image->add_option("--ba-series", i_series,
                    "write the Bland-Altman point set to this CSV");

  // calibrate
  auto* calibrate = app.add_subcommand(
      "calibrate", "Regression calibration with CCC and PA of predictions");
  std::string c_input, c_x, c_y;
  double c_alpha = 0.05, c_cad = 0.0;
  int c_bootstrap = 2000;
  calibrate->add_option("--input", c_input, "CSV input")->required();
  calibrate->add_option("--x", c_x, "device column (regressor)")->required();
  calibrate->add_option("--y", c_y, "reference column (regressand)")
      ->required();
  calibrate->add_option("--alpha", c_alpha, "CI level complement");
  calibrate->add_option("--cad", c_cad,
                        "acceptable difference (default: SD of reference)");
  calibrate->add_option("--bootstrap", c_bootstrap, "parametric resamples");

  CLI11_PARSE(app, argc, argv);

  try {
    if (classic->parsed())
      run_classic(input, col_x, col_y, alpha, loa_multiplier, opts);
    else if (robust->parsed())
      run_robust(r_input, r_x, r_y, family, delta, cap, r_bootstrap, r_alpha,
                 opts);
    else if (pa_cmd->parsed())
      run_pa(p_input, p_x, p_y, p_cad, p_alpha, p_bootstrap, p_grid, opts);
    else if (temporal->parsed())
      run_temporal(t_input, t_mode, t_x, t_y, t_subject, t_time, t_block,
                   t_bootstrap, t_alpha, t_kernel, t_bandwidth, opts);
    else if (mv->parsed())
      run_mv(m_input, m_x_cols, m_y_cols, m_weights, opts);
    else if (spatial->parsed())
      run_spatial(s_x, s_y, s_spacing, s_family, s_smooth_x, s_smooth_y,
                  s_lags, s_cad, opts);
    else if (lattice->parsed())
      run_lattice(l_edges, l_n, l_rho1, l_rho2, l_eta0, l_eta1, l_tau1, l_tau2,
                  l_mu1, l_mu2, opts);
    else if (image->parsed())
      run_image(i_a, i_b, i_grid, i_table1, i_seeds, i_mode, i_deltas,
                i_series, opts);
    else if (calibrate->parsed())
      run_calibrate(c_input, c_x, c_y, c_alpha, c_cad, c_bootstrap, opts);
  } catch (const parse_error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const error& e) {
    std::cerr << "analysis error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
