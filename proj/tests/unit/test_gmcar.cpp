#include <doctest.h>

#include <cmath>

#include "concord/errors.hpp"
#include "concord/gmcar.hpp"
#include "concord/mvn.hpp"
#include "concord/rng.hpp"

using namespace concord;

namespace {

LatticeSpec two_node_example() {
  LatticeSpec spec;
  spec.w1 = adjacency_from_edges(2, {{0, 1}});
  spec.mu1 = Eigen::VectorXd::Zero(2);
  spec.mu2 = Eigen::VectorXd::Zero(2);
  spec.rho1 = spec.rho2 = 0.0;
  spec.eta0 = 0.5;
  spec.eta1 = 0.0;
  spec.tau1 = spec.tau2 = 1.0;
  return spec;
}

LatticeSpec ring_spec(int n, Rng& rng) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
  LatticeSpec spec;
  spec.w1 = adjacency_from_edges(n, edges);
  spec.mu1.resize(n);
  spec.mu2.resize(n);
  for (int i = 0; i < n; ++i) {
    spec.mu1[i] = rng.normal();
    spec.mu2[i] = rng.normal();
  }
  spec.rho1 = 0.3;
  spec.rho2 = -0.2;
  spec.eta0 = 0.4;
  spec.eta1 = 0.1;
  spec.tau1 = 1.5;
  spec.tau2 = 0.8;
  return spec;
}

}  // namespace

TEST_CASE("gmcar_covariance: decoupled channels") {
  LatticeSpec spec = two_node_example();
  spec.eta0 = 0.0;
  const GmcarCovariance cov = gmcar_covariance(spec);
  CHECK(cov.s12.isZero(1e-14));
  // S11 = [tau1 (D_w - rho1 W1)]^{-1} with rho1 = 0: inverse of D_w = I
  CHECK(cov.s11.isApprox(Eigen::MatrixXd::Identity(2, 2), 1e-13));
}

TEST_CASE("gmcar_covariance: two-node hand matrices") {
  const GmcarCovariance cov = gmcar_covariance(two_node_example());
  CHECK(cov.s22.isApprox(Eigen::MatrixXd::Identity(2, 2), 1e-13));
  CHECK(cov.s12.isApprox(0.5 * Eigen::MatrixXd::Identity(2, 2), 1e-13));
  CHECK(cov.s11.isApprox(1.25 * Eigen::MatrixXd::Identity(2, 2), 1e-13));
}

TEST_CASE("gmcar_covariance: stacked covariance is PSD on a random spec") {
  Rng rng(42);
  const LatticeSpec spec = ring_spec(10, rng);
  const GmcarCovariance cov = gmcar_covariance(spec);
  Eigen::MatrixXd stacked(20, 20);
  stacked.topLeftCorner(10, 10) = cov.s11;
  stacked.topRightCorner(10, 10) = cov.s12;
  stacked.bottomLeftCorner(10, 10) = cov.s12.transpose();
  stacked.bottomRightCorner(10, 10) = cov.s22;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(stacked);
  CHECK(eig.eigenvalues().minCoeff() > -1e-10);
}

TEST_CASE("gmcar_covariance: inadmissible rho names the failing factor") {
  LatticeSpec spec = two_node_example();
  spec.rho2 = 1.5;
  CHECK_THROWS_WITH_AS(gmcar_covariance(spec), doctest::Contains("rho2"),
                       invalid_covariance_error);
}

TEST_CASE("lattice_ccc: hand value 4/9 and decoupled zero") {
  CHECK(lattice_ccc(two_node_example()) ==
        doctest::Approx(4.0 / 9.0).epsilon(1e-13));

  LatticeSpec spec = two_node_example();
  spec.eta0 = 0.0;
  CHECK(lattice_ccc(spec) == 0.0);
}

TEST_CASE("lattice_ccc: decreases monotonically in a mean shift") {
  LatticeSpec spec = two_node_example();
  double prev = lattice_ccc(spec);
  for (double shift : {0.5, 1.0, 2.0, 5.0, 20.0}) {
    spec.mu2 = Eigen::VectorXd::Constant(2, shift);
    const double v = lattice_ccc(spec);
    CHECK(v < prev);
    CHECK(v > 0.0);
    prev = v;
  }
}

TEST_CASE("lattice_ccc: invariant under node relabeling") {
  Rng rng(43);
  const LatticeSpec spec = ring_spec(8, rng);
  const double base = lattice_ccc(spec);

  // deterministic permutation
  std::vector<int> perm{3, 1, 7, 0, 5, 2, 6, 4};
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(8, 8);
  for (int i = 0; i < 8; ++i) p(i, perm[i]) = 1.0;

  LatticeSpec relabeled = spec;
  relabeled.w1 = p * spec.w1 * p.transpose();
  relabeled.mu1 = p * spec.mu1;
  relabeled.mu2 = p * spec.mu2;
  CHECK(lattice_ccc(relabeled) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("gmcar: conditional factorization reproduces the joint covariance") {
  // sample X2 ~ N(mu2, S22), then X1 | X2 per the conditional display, and
  // compare empirical second moments against the covariance blocks.
  Rng rng(44);
  LatticeSpec spec = ring_spec(5, rng);
  spec.mu1.setZero();
  spec.mu2.setZero();
  const GmcarCovariance cov = gmcar_covariance(spec);

  const Eigen::Index n = 5;
  Eigen::MatrixXd prec2 = -spec.rho2 * spec.w1;
  prec2.diagonal() += spec.row_sums();
  const Eigen::MatrixXd s2 =
      (spec.tau2 * prec2).inverse();
  Eigen::MatrixXd prec1 = -spec.rho1 * spec.w1;
  prec1.diagonal() += spec.row_sums();
  const Eigen::MatrixXd cond_cov = (spec.tau1 * prec1).inverse();
  const Eigen::MatrixXd link =
      spec.eta0 * Eigen::MatrixXd::Identity(n, n) + spec.eta1 * spec.w1;

  MvnSampler draw2(Eigen::VectorXd::Zero(n), s2);
  MvnSampler draw_cond(Eigen::VectorXd::Zero(n), cond_cov);

  const int reps = 100000;
  Eigen::MatrixXd acc11 = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd acc12 = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd acc22 = Eigen::MatrixXd::Zero(n, n);
  for (int r = 0; r < reps; ++r) {
    const Eigen::VectorXd x2 = draw2.draw(rng);
    const Eigen::VectorXd x1 = link * x2 + draw_cond.draw(rng);
    acc11 += x1 * x1.transpose();
    acc12 += x1 * x2.transpose();
    acc22 += x2 * x2.transpose();
  }
  acc11 /= reps;
  acc12 /= reps;
  acc22 /= reps;

  // 3-sigma bound per entry: Var(u v) <= Var(u)Var(v) + Cov(u,v)^2 scale
  auto check_block = [&](const Eigen::MatrixXd& emp,
                         const Eigen::MatrixXd& expect,
                         const Eigen::MatrixXd& var_a,
                         const Eigen::MatrixXd& var_b) {
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) {
        const double se = std::sqrt(
            (var_a(i, i) * var_b(j, j) + expect(i, j) * expect(i, j)) / reps);
        CHECK(std::abs(emp(i, j) - expect(i, j)) < 3.5 * se);
      }
  };
  check_block(acc11, cov.s11, cov.s11, cov.s11);
  check_block(acc12, cov.s12, cov.s11, cov.s22);
  check_block(acc22, cov.s22, cov.s22, cov.s22);
}

TEST_CASE("lattice spec validation") {
  LatticeSpec spec = two_node_example();
  spec.w1(0, 0) = 1.0;
  CHECK_THROWS_AS(gmcar_covariance(spec), invalid_argument_error);
  spec = two_node_example();
  spec.w1(0, 1) = 0.5;
  CHECK_THROWS_AS(gmcar_covariance(spec), invalid_argument_error);
  spec = two_node_example();
  spec.tau1 = 0.0;
  CHECK_THROWS_AS(gmcar_covariance(spec), invalid_argument_error);
  CHECK_THROWS_AS(adjacency_from_edges(3, {{0, 3}}), invalid_argument_error);
  CHECK_THROWS_AS(adjacency_from_edges(3, {{1, 1}}), invalid_argument_error);
}
