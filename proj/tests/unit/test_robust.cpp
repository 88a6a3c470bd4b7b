#include <doctest.h>

#include <cmath>
#include <vector>

#include "concord/classic.hpp"
#include "concord/errors.hpp"
#include "concord/rng.hpp"
#include "concord/robust.hpp"
#include "concord/special.hpp"

using namespace concord;

namespace {

// Literal transcription of the resolved double-sum estimator, kept
// independent of the library path it checks.
double rho_g_brute_force(const std::vector<double>& x,
                         const std::vector<double>& y,
                         const DistanceFunction& g) {
  const std::size_t n = x.size();
  double cross = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      cross += g(x[i] - y[j]) - g(x[i] + y[j]);
  cross /= static_cast<double>(n);
  double paired = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    paired += g(x[i] - y[i]) - g(x[i] + y[i]);
    scale += 0.5 * (g(2.0 * x[i]) + g(2.0 * y[i]));
  }
  return (cross - paired) / (cross + scale);
}

PairedSample normal_pairs(Rng& rng, std::size_t n, double mx, double my,
                          double sx, double sy, double rho) {
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double z1 = rng.normal();
    const double z2 = rng.normal();
    x[i] = mx + sx * z1;
    y[i] = my + sy * (rho * z1 + std::sqrt(1.0 - rho * rho) * z2);
  }
  return PairedSample(x, y);
}

}  // namespace

TEST_CASE("distance functions: shape invariants") {
  Rng rng(64);
  for (const DistanceFunction& g :
       {DistanceFunction::power(1.0), DistanceFunction::power(1.5),
        DistanceFunction::squared(), DistanceFunction::absolute(),
        DistanceFunction::winsorized_power(1.5, 2.0)}) {
    CHECK(g(0.0) == 0.0);
    double prev = 0.0;
    for (double z = 0.05; z < 5.0; z += 0.05) {
      CHECK(g(z) == g(-z));
      CHECK(g(z) >= prev);
      prev = g(z);
    }
  }
  const DistanceFunction w = DistanceFunction::winsorized_power(1.5, 2.0);
  CHECK(w(3.7) == doctest::Approx(std::pow(2.0, 1.5)));  // capped tail
  CHECK(w(1.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(DistanceFunction::power(0.0), invalid_argument_error);
  CHECK_THROWS_AS(DistanceFunction::winsorized_power(1.0, -1.0),
                  invalid_argument_error);
}

TEST_CASE("rho_g_sample: perfect agreement is exactly 1") {
  std::vector<double> x{0.3, -1.2, 2.5, 0.9, -0.4};
  CHECK(rho_g_sample(PairedSample(x, x), DistanceFunction::absolute()) == 1.0);
  CHECK(rho_g_sample(PairedSample(x, x), DistanceFunction::power(1.5)) == 1.0);
}

TEST_CASE("rho_g_sample: hand sample equals the brute-force double sums") {
  const std::vector<double> x{0, 1, 2, 3};
  const std::vector<double> y{0, 1, 2, 4};
  const DistanceFunction g = DistanceFunction::absolute();
  const double brute = rho_g_brute_force(x, y, g);
  CHECK(rho_g_sample(PairedSample(x, y), g) ==
        doctest::Approx(brute).epsilon(1e-14));
  // frozen value of the hand case
  CHECK(brute == doctest::Approx(5.0 / 6.0).epsilon(1e-14));
}

TEST_CASE("rho_g_sample: squared distance approaches lin_ccc") {
  Rng rng(90210);
  double gap = 0.0;
  const int reps = 50;
  for (int rep = 0; rep < reps; ++rep) {
    const PairedSample s = normal_pairs(rng, 1000, 0.2, 0.0, 1.0, 1.3, 0.7);
    const double rg = rho_g_sample(s, DistanceFunction::squared());
    const double rc = lin_ccc(summarize(s, DivisorMode::unbiased));
    gap += std::abs(rg - rc);
  }
  CHECK(gap / reps < 0.02);
}

TEST_CASE("rho_g_sample: invariant under relabeling of pairs") {
  Rng rng(3);
  const PairedSample s = normal_pairs(rng, 40, 0.0, 0.5, 1.0, 1.0, 0.5);
  std::vector<double> xr(s.x().rbegin(), s.x().rend());
  std::vector<double> yr(s.y().rbegin(), s.y().rend());
  const DistanceFunction g = DistanceFunction::power(1.5);
  CHECK(rho_g_sample(PairedSample(xr, yr), g) ==
        doctest::Approx(rho_g_sample(s, g)).epsilon(1e-12));
}

TEST_CASE("rho_g_sample: subsampled path tracks the direct path") {
  Rng rng(17);
  const PairedSample s = normal_pairs(rng, 600, 0.0, 0.1, 1.0, 1.1, 0.6);
  const DistanceFunction g = DistanceFunction::absolute();
  const double direct = rho_g_sample(s, g);
  RhoGOptions opts;
  opts.direct_limit = 100;  // force the estimator
  opts.subsample_pairs = 2000000;
  const double sub = rho_g_sample(s, g, opts);
  CHECK(std::abs(direct - sub) < 0.01);
}

TEST_CASE("rho1_normal: anchors") {
  SUBCASE("X = Y") {
    CHECK(rho1_normal({1.0, 1.0, 2.0, 2.0, 2.0}) == doctest::Approx(1.0));
  }
  SUBCASE("independent equal marginals: exactly 0") {
    CHECK(rho1_normal({0.0, 0.0, 1.0, 1.0, 0.0}) ==
          doctest::Approx(0.0).epsilon(1e-14));
  }
  SUBCASE("gamma = 0 closed form matches the general formula to 1e-12") {
    Rng rng(7);
    for (int rep = 0; rep < 100; ++rep) {
      BivariateNormalParams p;
      p.mu_x = p.mu_y = rng.normal();
      p.var_x = 0.2 + 2.0 * rng.uniform01();
      p.var_y = 0.2 + 2.0 * rng.uniform01();
      p.cov_xy = (2.0 * rng.uniform01() - 1.0) * std::sqrt(p.var_x * p.var_y);
      const double direct =
          1.0 - std::sqrt((p.var_x + p.var_y - 2.0 * p.cov_xy) /
                          (p.var_x + p.var_y));
      CHECK(std::abs(rho1_normal(p) - direct) < 1e-12);
    }
  }
  SUBCASE("mean-shift invariance and upper bound") {
    Rng rng(8);
    for (int rep = 0; rep < 50; ++rep) {
      BivariateNormalParams p;
      p.mu_x = rng.normal(0, 2);
      p.mu_y = rng.normal(0, 2);
      p.var_x = 0.3 + rng.uniform01();
      p.var_y = 0.3 + rng.uniform01();
      p.cov_xy = (2.0 * rng.uniform01() - 1.0) * std::sqrt(p.var_x * p.var_y);
      const double r = rho1_normal(p);
      CHECK(r <= 1.0);
      BivariateNormalParams q = p;
      q.mu_x += 5.0;
      q.mu_y += 5.0;
      CHECK(rho1_normal(q) == doctest::Approx(r).epsilon(1e-12));
    }
  }
  SUBCASE("non-PSD input rejected") {
    CHECK_THROWS_AS(rho1_normal({0.0, 0.0, 1.0, 1.0, 1.5}),
                    invalid_covariance_error);
  }
}

TEST_CASE("rho1_normal: Monte Carlo expectation oracle") {
  // gamma = 1, unit variances, cov 0.5
  const BivariateNormalParams p{1.0, 0.0, 1.0, 1.0, 0.5};
  const double closed = rho1_normal(p);

  Rng rng(321);
  const int n = 1000000;
  double acc_dep = 0.0, acc2_dep = 0.0, acc_ind = 0.0, acc2_ind = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z1 = rng.normal();
    const double z2 = rng.normal();
    const double x = p.mu_x + z1;
    const double y = p.mu_y + 0.5 * z1 + std::sqrt(1.0 - 0.25) * z2;
    const double d = std::abs(x - y);
    acc_dep += d;
    acc2_dep += d * d;
    const double xi = p.mu_x + rng.normal();
    const double yi = p.mu_y + rng.normal();
    const double di = std::abs(xi - yi);
    acc_ind += di;
    acc2_ind += di * di;
  }
  const double m_dep = acc_dep / n, m_ind = acc_ind / n;
  const double sd_dep = std::sqrt(acc2_dep / n - m_dep * m_dep);
  const double sd_ind = std::sqrt(acc2_ind / n - m_ind * m_ind);
  const double mc = 1.0 - m_dep / m_ind;
  // delta-method SE of the ratio estimate
  const double se = std::hypot(sd_dep / m_ind,
                               m_dep * sd_ind / (m_ind * m_ind)) /
                    std::sqrt(static_cast<double>(n));
  CHECK(std::abs(closed - mc) < 3.0 * se);
}

TEST_CASE("elliptical spec: normalization constants") {
  const BivariateNormalParams p{0.0, 0.0, 1.0, 1.0, 0.3};
  SUBCASE("gaussian: C_g = 1/sqrt(2 pi)") {
    const EllipticalSpec spec = EllipticalSpec::gaussian(p);
    CHECK(spec.normalization() ==
          doctest::Approx(1.0 / std::sqrt(2.0 * M_PI)).epsilon(1e-9));
  }
  SUBCASE("student t: C_g matches the closed-form t normalizer") {
    for (double nu : {3.0, 5.0, 12.0}) {
      const EllipticalSpec spec = EllipticalSpec::student_t(nu, p);
      const double expected = std::tgamma(0.5 * (nu + 1.0)) /
                              (std::sqrt(nu * M_PI) * std::tgamma(0.5 * nu));
      CHECK(spec.normalization() == doctest::Approx(expected).epsilon(1e-8));
    }
  }
  SUBCASE("normalization invariant: integral of C_g g equals 1 within 1e-6") {
    for (const EllipticalSpec& spec :
         {EllipticalSpec::gaussian(p), EllipticalSpec::student_t(5.0, p)}) {
      const double cg = spec.normalization();
      // left half doubled (even integrand)
      const double integral =
          2.0 * cg *
          [&spec]() {
            double acc = 0.0;
            const int steps = 400000;
            const double width = 60.0 / steps;
            for (int i = 0; i < steps; ++i) {
              const double r = -30.0 + (i + 0.5) * width;
              if (r > 0.0) break;
              acc += spec.generator_value(r * r) * width;
            }
            return acc;
          }();
      CHECK(std::abs(integral - 1.0) < 1e-6);
    }
  }
  SUBCASE("nu <= 2 rejected") {
    CHECK_THROWS_AS(EllipticalSpec::student_t(2.0, p), invalid_argument_error);
  }
}

TEST_CASE("rho1_elliptical: gaussian generator reduces to the normal form") {
  Rng rng(55);
  for (int rep = 0; rep < 25; ++rep) {
    BivariateNormalParams p;
    p.mu_x = rng.normal(0, 1);
    p.mu_y = rng.normal(0, 1);
    p.var_x = 0.3 + 2.0 * rng.uniform01();
    p.var_y = 0.3 + 2.0 * rng.uniform01();
    p.cov_xy = (2.0 * rng.uniform01() - 1.0) * 0.9 * std::sqrt(p.var_x * p.var_y);
    CHECK(std::abs(rho1_elliptical(EllipticalSpec::gaussian(p)) -
                   rho1_normal(p)) < 1e-8);
  }
}

TEST_CASE("rho1_elliptical: large-nu limit approaches the normal value") {
  const BivariateNormalParams p{0.0, 0.0, 1.0, 1.0, 0.3};
  const double t200 = rho1_elliptical(EllipticalSpec::student_t(200.0, p));
  CHECK(std::abs(t200 - rho1_normal(p)) < 1e-3);
}

TEST_CASE("rho1_elliptical: t(5) matches the scale-mixture Monte Carlo") {
  // shared mixing variable; the independence reference zeroes sigma_xy
  // within the same elliptical family.
  const double nu = 5.0;
  const BivariateNormalParams p{0.5, 0.0, 1.0, 1.0, 0.3};
  const double closed = rho1_elliptical(EllipticalSpec::student_t(nu, p));

  Rng rng(777);
  const int n = 1000000;
  double acc_dep = 0.0, acc2_dep = 0.0, acc_ind = 0.0, acc2_ind = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z1 = rng.normal();
    const double z2 = rng.normal();
    const double w = std::sqrt(rng.chi_square(5) / nu);
    const double x = (1.0 * z1) / w + p.mu_x;
    const double y = (0.3 * z1 + std::sqrt(1.0 - 0.09) * z2) / w + p.mu_y;
    const double d = std::abs(x - y);
    acc_dep += d;
    acc2_dep += d * d;

    const double wi = std::sqrt(rng.chi_square(5) / nu);
    const double xi = rng.normal() / wi + p.mu_x;
    const double yi = rng.normal() / wi + p.mu_y;
    const double di = std::abs(xi - yi);
    acc_ind += di;
    acc2_ind += di * di;
  }
  const double m_dep = acc_dep / n, m_ind = acc_ind / n;
  const double sd_dep = std::sqrt(acc2_dep / n - m_dep * m_dep);
  const double sd_ind = std::sqrt(acc2_ind / n - m_ind * m_ind);
  const double mc = 1.0 - m_dep / m_ind;
  const double se = std::hypot(sd_dep / m_ind,
                               m_dep * sd_ind / (m_ind * m_ind)) /
                    std::sqrt(static_cast<double>(n));
  CHECK(std::abs(closed - mc) < 3.0 * se);
}
