#pragma once

#include <cstdint>
#include <optional>

#include "concord/rng.hpp"
#include "concord/sample.hpp"

namespace concord {

/// Even distance function g with g(0) = 0, nondecreasing on [0, inf).
///
/// Families: |z|^delta (power), its winsorized variant capped at g(z0) for
/// |z| >= z0, and the named special cases z^2 and |z|. delta = 1.0 and 1.5
/// are the presets that performed best in the source simulations.
class DistanceFunction {
 public:
  static DistanceFunction power(double delta);
  static DistanceFunction winsorized_power(double delta, double cap);
  static DistanceFunction squared() { return power(2.0); }
  static DistanceFunction absolute() { return power(1.0); }

  double operator()(double z) const;
  double delta() const noexcept { return delta_; }
  bool winsorized() const noexcept { return cap_ > 0.0; }
  double cap() const noexcept { return cap_; }

 private:
  DistanceFunction(double delta, double cap) : delta_(delta), cap_(cap) {}
  double delta_;
  double cap_;  // 0 means no winsorization
};

struct RhoGOptions {
  /// Direct O(n^2) evaluation up to this n; larger samples estimate the
  /// cross-pair sums from `subsample_pairs` uniformly drawn (i, j) pairs.
  std::size_t direct_limit = 20000;
  std::size_t subsample_pairs = 10'000'000;
  std::uint64_t subsample_seed = 0x5eed;
};

/// Sample robust concordance: ratio of U-statistic double sums
///
///   [ (1/n) sum_ij {g(Xi-Yj) - g(Xi+Yj)} - sum_i {g(Xi-Yi) - g(Xi+Yi)} ]
///   ----------------------------------------------------------------------
///   [ (1/n) sum_ij {g(Xi-Yj) - g(Xi+Yj)} + (1/2) sum_i {g(2Xi) + g(2Yi)} ]
///
/// The denominator's final term is the bracketing that makes g = z^2 reduce
/// to Lin's CCC and X = Y evaluate to exactly 1; the source display is
/// typographically ambiguous there (see the module tests for both anchors).
double rho_g_sample(const PairedSample& sample, const DistanceFunction& g,
                    const RhoGOptions& options = {});

/// L1 agreement coefficient rho_1 = 1 - E|X-Y| / E(|X-Y| : sigma_xy = 0)
/// in closed form under bivariate normality.
double rho1_normal(const BivariateNormalParams& p);

/// Elliptically contoured law for (X, Y): gaussian or Student-t generator.
/// The evaluation uses the univariate marginal generator of X - Y (for
/// student_t(nu) that is (1 + u/nu)^{-(nu+1)/2}), with its normalizing
/// constant computed by quadrature, never supplied.
class EllipticalSpec {
 public:
  enum class Generator { gaussian, student_t };

  static EllipticalSpec gaussian(const BivariateNormalParams& p);
  /// Requires nu > 2 so second moments exist.
  static EllipticalSpec student_t(double nu, const BivariateNormalParams& p);

  Generator generator() const noexcept { return generator_; }
  double nu() const noexcept { return nu_; }
  const BivariateNormalParams& params() const noexcept { return params_; }

  /// Marginal density generator g(u), u = r^2.
  double generator_value(double u) const;
  /// C_g with integral C_g * int_R g(r^2) dr = 1, computed by quadrature.
  double normalization() const;

 private:
  EllipticalSpec(Generator g, double nu, const BivariateNormalParams& p);
  Generator generator_;
  double nu_;
  BivariateNormalParams params_;
};

/// rho_1 for an elliptically contoured law via adaptive quadrature of the
/// half-line integrals of g(r^2) and r g(r^2). Absolute tolerance 1e-10.
double rho1_elliptical(const EllipticalSpec& spec);

}  // namespace concord
