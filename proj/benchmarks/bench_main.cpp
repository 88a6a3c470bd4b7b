#include <benchmark/benchmark.h>

#include <vector>

#include "concord/classic.hpp"
#include "concord/image.hpp"
#include "concord/multivariate.hpp"
#include "concord/rng.hpp"
#include "concord/robust.hpp"
#include "concord/spatial.hpp"

using namespace concord;

namespace {

PairedSample make_pairs(std::size_t n) {
  Rng rng(1);
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = rng.normal();
    x[i] = z;
    y[i] = 0.8 * z + 0.5 * rng.normal();
  }
  return PairedSample(x, y);
}

Image make_test_image(int ny, int nx) {
  Rng rng(2);
  Eigen::MatrixXd px(ny, nx);
  for (int i = 0; i < ny; ++i)
    for (int j = 0; j < nx; ++j) px(i, j) = rng.normal(0.5, 0.17);
  return make_image(px);
}

void bm_rho_g_double_sum(benchmark::State& state) {
  const PairedSample s = make_pairs(static_cast<std::size_t>(state.range(0)));
  const DistanceFunction g = DistanceFunction::absolute();
  for (auto _ : state) benchmark::DoNotOptimize(rho_g_sample(s, g));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(bm_rho_g_double_sum)->Range(256, 4096)->Complexity();

void bm_lin_ccc(benchmark::State& state) {
  const PairedSample s = make_pairs(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    const SampleMoments m = summarize(s, DivisorMode::unbiased);
    benchmark::DoNotOptimize(lin_ccc(m));
  }
}
BENCHMARK(bm_lin_ccc)->Range(1024, 262144);

void bm_ssim_global(benchmark::State& state) {
  const Image a = make_test_image(341, 512);
  const Image b = make_test_image(341, 512);
  for (auto _ : state) benchmark::DoNotOptimize(ssim(a, b).value);
}
BENCHMARK(bm_ssim_global);

void bm_contaminate(benchmark::State& state) {
  const Image a = make_test_image(341, 512);
  Rng rng(3);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        contaminate(a, 0.05, 1.0, 10.0, ContaminationMode::replace, rng)
            .corrupted);
}
BENCHMARK(bm_contaminate);

void bm_simulate_field(benchmark::State& state) {
  SpatialModel m = make_exponential_model();
  m.rho_co = 0.6;
  const int side = static_cast<int>(state.range(0));
  Rng rng(4);
  for (auto _ : state)
    benchmark::DoNotOptimize(simulate_field(m, side, side, 1.0, rng).x.sum());
}
BENCHMARK(bm_simulate_field)->Arg(16)->Arg(24)->Arg(32);

void bm_fit_bivariate_ml(benchmark::State& state) {
  SpatialModel m = make_exponential_model();
  m.rho_co = 0.6;
  m.range_x = m.range_y = m.range_xy = 2.0;
  const int side = static_cast<int>(state.range(0));
  Rng rng(5);
  const GridField f = simulate_field(m, side, side, 1.0, rng);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        fit_bivariate_ml(f, CovFamily::exponential).log_likelihood);
}
BENCHMARK(bm_fit_bivariate_ml)->Arg(15)->Arg(30)->Unit(benchmark::kMillisecond);

void bm_matrix_ccc_sample(benchmark::State& state) {
  Rng rng(6);
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  std::vector<Eigen::VectorXd> xs, ys;
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::VectorXd x(4), y(4);
    for (int k = 0; k < 4; ++k) {
      x[k] = rng.normal();
      y[k] = 0.7 * x[k] + 0.4 * rng.normal();
    }
    xs.push_back(x);
    ys.push_back(y);
  }
  const VectorPairSample sample(xs, ys);
  for (auto _ : state)
    benchmark::DoNotOptimize(matrix_ccc_sample(sample).ccc.value);
}
BENCHMARK(bm_matrix_ccc_sample)->Range(256, 8192);

}  // namespace

BENCHMARK_MAIN();
