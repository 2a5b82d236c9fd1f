#include "kerninv/oracle.hpp"
#include "kerninv/pencil.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <numbers>
#include <random>

using namespace kerninv;
using namespace kerninv::testing;

TEST_CASE("dense reference on small pencils") {
  CHECK(oracle::dense_eig_reference(MatrixXd::Constant(1, 1, 6.0), MatrixXd::Constant(1, 1, 2.0)) == doctest::Approx(3.0).epsilon(1e-15));
  const MatrixXd d = Eigen::Vector2d(1.0, 4.0).asDiagonal();
  CHECK(oracle::dense_eig_reference(d, MatrixXd::Identity(2, 2)) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK_THROWS_AS(oracle::dense_eig_reference(MatrixXd::Identity(33, 33), MatrixXd::Identity(33, 33)),
                  InvalidArgument);
  CHECK_THROWS_AS(oracle::dense_eig_reference(d, -MatrixXd::Identity(2, 2)), NumericalError);
}

TEST_CASE("random pencils: the library eigensolver agrees with the references") {
  std::mt19937_64 rng(97);
  std::normal_distribution<double> n;
  std::uniform_int_distribution<int> size(2, 20);
  for (int trial = 0; trial < 50; ++trial) {
    const int k = size(rng);
    MatrixXd a(k, k), rows(k + 5, k);
    for (auto& x : a.reshaped()) x = n(rng);
    for (auto& x : rows.reshaped()) x = n(rng);
    a = a * a.transpose();
    const MatrixXd b = rows.transpose() * rows;
    const double lambda = top_generalized_eigen(a, square_root_from_rows(rows)).lambda;
    INFO("trial " << trial << ", n = " << k);
    CHECK(oracle::dense_eig_reference(a, b) == doctest::Approx(lambda).epsilon(1e-8));
    CHECK(oracle::mc_rayleigh_bound(a, b, 2000, 101 + trial) <= lambda * (1.0 + 1e-10));
  }
}

TEST_CASE("oracles are deterministic") {
  const MatrixXd a = Eigen::Vector3d(1.0, 2.0, 3.0).asDiagonal();
  CHECK(oracle::mc_rayleigh_bound(a, MatrixXd::Identity(3, 3), 500, 7) ==
        oracle::mc_rayleigh_bound(a, MatrixXd::Identity(3, 3), 500, 7));
  const TrialSpace sp(MaternKernel(1.0, 1), uniform_refinement(unit_interval(), 2));
  const QuadratureRule rule = build_rule(unit_interval(), 4);
  const PointsXd grid = candidate_grid(unit_interval(), 64);
  CHECK(oracle::brute_sup_norm_ratio(sp, rule, 50, grid, 3) == oracle::brute_sup_norm_ratio(sp, rule, 50, grid, 3));
}

TEST_CASE("pairwise scan") {
  const auto r = oracle::pairwise_scan(line_points({0.0, 1.0}), unit_interval(), 1001);
  CHECK(r.q == 0.5);
  CHECK(r.h == doctest::Approx(0.5).epsilon(1e-12));
  const auto c = oracle::pairwise_scan(plane_points({{1.0, 0.0}, {-1.0, 0.0}}), Manifold{}, 4000);
  CHECK(c.q == doctest::Approx(std::numbers::pi / 2).epsilon(1e-14));
  CHECK(c.h == doctest::Approx(std::numbers::pi / 2).epsilon(1e-14));
  const auto s = oracle::pairwise_scan(plane_points({{0.5, 0.5}}), unit_square(), 10201);
  CHECK(s.h == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
}
