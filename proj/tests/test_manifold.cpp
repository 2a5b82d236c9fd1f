#include "kerninv/manifold.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace kerninv;
using namespace kerninv::testing;

namespace {

constexpr double kPi = std::numbers::pi;

double angle_of(const Eigen::Ref<const Eigen::VectorXd>& x) { return std::atan2(x(1), x(0)); }

ScalarField cos_mode(int k) {
  return [k](const Eigen::Ref<const Eigen::VectorXd>& x) { return std::cos(k * angle_of(x)); };
}

}  // namespace

TEST_CASE("constant-normal extension") {
  const BandExtension one = extend_constant_normal(cos_mode(0), 0.1);
  CHECK(one(Eigen::Vector2d(0.0, 1.07)) == 1.0);
  const BandExtension c = extend_constant_normal(cos_mode(1), 0.1);
  CHECK(c(Eigen::Vector2d(1.05, 0.0)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(c(Eigen::Vector2d(-0.93, 0.0)) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(c.band.volume() == doctest::Approx(0.4 * kPi).epsilon(1e-14));

  const BandExtension c3 = extend_constant_normal(cos_mode(3), 0.2);
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * kPi), rad(0.8, 1.2);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double t = ang(rng);
    const Eigen::Vector2d dir(std::cos(t), std::sin(t));
    worst = std::max(worst, std::abs(c3(rad(rng) * dir) - c3(dir)));
  }
  CHECK(worst <= 1e-14);
  CHECK_THROWS_AS(c3(Eigen::Vector2d(0.0, 0.0)), InvalidArgument);
  CHECK_THROWS_AS(extend_constant_normal(cos_mode(1), 1.0), InvalidArgument);
}

TEST_CASE("extension equivalence ratio is one") {
  for (int k : {0, 1, 3})
    for (double delta : {0.05, 0.2}) {
      INFO("k = " << k << ", delta = " << delta);
      CHECK(std::abs(equivalence_ratio_extension(cos_mode(k), delta, 3) - 1.0) <= 1e-8);
    }
}

TEST_CASE("trial-space band equivalence") {
  const TrialSpace sp(MaternKernel(2.5, 2), uniform_refinement(Manifold{}, 4));
  const VectorXd c = random_trial_coefficients(sp, 73);
  CHECK(trial_equivalence_ratio(sp, VectorXd::Zero(sp.size()), 0.1, 0.0, 2, 9) == 1.0);

  const double r0 = trial_equivalence_ratio(sp, c, 0.1, 0.0, 2, 9);
  CHECK(r0 >= 0.5);
  CHECK(r0 <= 2.0);
  CHECK(trial_equivalence_ratio(sp, 2.0 * c, 0.1, 0.0, 2, 9) == doctest::Approx(r0).epsilon(1e-12));
  const double r1 = trial_equivalence_ratio(sp, c, 0.1, 1.0, 2, 9);
  CHECK(r1 >= 0.5);
  CHECK(r1 <= 2.0);

  CHECK(trial_equivalence_admissible(1.0, 2.0));
  CHECK_FALSE(trial_equivalence_admissible(1.0, 1.0));
  CHECK_THROWS_WITH_AS(trial_equivalence_ratio(sp, c, 0.1, 1.5, 2, 9), doctest::Contains("floor(tau - 1/2)"),
                       InvalidArgument);
  const TrialSpace dom(MaternKernel(2.5, 2), uniform_refinement(unit_square(), 2));
  CHECK_THROWS_AS(trial_equivalence_ratio(dom, VectorXd::Ones(dom.size()), 0.1, 0.0, 2, 9), InvalidArgument);
}

TEST_CASE("one-dimensional Poincare bound") {
  auto one = [](double) { return 1.0; };
  auto zero = [](double) { return 0.0; };
  const PoincareResult a = poincare_check(one, zero, 0.3, 1.0);
  CHECK(a.lhs == 1.0);
  CHECK(a.rhs == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(a.holds);
  const PoincareResult b = poincare_check(one, zero, 0.3, 2.0);
  CHECK(b.rhs == doctest::Approx(2.0).epsilon(1e-14));

  // a sharp bump: the derivative term carries the bound
  const double w = 1e-2;
  auto bump = [w](double x) { return std::exp(-x * x / (w * w)); };
  auto dbump = [w](double x) { return -2.0 * x / (w * w) * std::exp(-x * x / (w * w)); };
  for (double p : {1.0, 1.5, 2.0, 4.0}) {
    const PoincareResult r = poincare_check(bump, dbump, 0.5, p);
    INFO("p = " << p);
    CHECK(r.holds);
    CHECK(r.lhs == 1.0);
  }
  CHECK_THROWS_AS(poincare_check(one, zero, 0.3, 0.5), InvalidArgument);
  CHECK_THROWS_AS(poincare_check(one, zero, 0.0, 2.0), InvalidArgument);
}

TEST_CASE("manifold Bernstein constant") {
  const TrialSpace sp(MaternKernel(2.5, 2), uniform_refinement(Manifold{}, 3));
  CHECK(manifold_bernstein_constant(sp, 0.0, 8).value == 1.0);

  const TrialSpace one(MaternKernel(2.5, 2), make_point_set(plane_points({{1.0, 0.0}}), Manifold{}));
  const VectorXd samples = evaluate_trial(one, VectorXd::Ones(1), circle_samples(10));
  const double direct = circle_spectral_norm(samples, 1.0) / circle_spectral_norm(samples, 0.0);
  CHECK(manifold_bernstein_constant(one, 1.0, 10).value == doctest::Approx(direct).epsilon(1e-10));

  const ConstantEstimate e = manifold_bernstein_constant(sp, 1.5, 9);
  const VectorXd u = evaluate_trial(sp, e.extremizer, circle_samples(9));
  CHECK(circle_spectral_norm(u, 1.5) / circle_spectral_norm(u, 0.0) == doctest::Approx(e.value).epsilon(1e-8));
  std::mt19937_64 rng(79);
  std::normal_distribution<double> n;
  for (int t = 0; t < 200; ++t) {
    VectorXd c(sp.size());
    for (auto& x : c) x = n(rng);
    const VectorXd v = evaluate_trial(sp, c, circle_samples(9));
    CHECK(circle_spectral_norm(v, 1.5) / circle_spectral_norm(v, 0.0) <= e.value * (1.0 + 1e-10));
  }

  CHECK(manifold_bernstein_admissible(0.0, 1.0));
  CHECK(manifold_bernstein_admissible(1.0, 1.0));
  CHECK_FALSE(manifold_bernstein_admissible(0.5, 1.0));
  const TrialSpace low(MaternKernel(1.5, 2), uniform_refinement(Manifold{}, 3));
  CHECK_THROWS_WITH_AS(manifold_bernstein_constant(low, 0.5, 8), doctest::Contains("outside the admissible set"),
                       InvalidArgument);
  CHECK_THROWS_AS(manifold_bernstein_constant(TrialSpace(MaternKernel(2.0, 1), uniform_refinement(unit_interval(), 2)),
                                              1.0, 8),
                  InvalidArgument);
}

TEST_CASE("manifold Nikolskii constant") {
  const TrialSpace one(MaternKernel(2.5, 2), make_point_set(plane_points({{0.0, 1.0}}), Manifold{}));
  const VectorXd samples = evaluate_trial(one, VectorXd::Ones(1), circle_samples(10));
  CHECK(manifold_nikolskii_constant(one, 10, 12).value ==
        doctest::Approx(1.0 / circle_spectral_norm(samples, 0.0)).epsilon(1e-10));

  const TrialSpace sp(MaternKernel(2.5, 2), uniform_refinement(Manifold{}, 3));
  const ConstantEstimate e = manifold_nikolskii_constant(sp, 9, 12);
  std::mt19937_64 rng(83);
  std::normal_distribution<double> n;
  double mc = 0.0;
  for (int t = 0; t < 2000; ++t) {
    VectorXd c(sp.size());
    for (auto& x : c) x = n(rng);
    const VectorXd v = evaluate_trial(sp, c, circle_samples(12));
    mc = std::max(mc, v.cwiseAbs().maxCoeff() / circle_spectral_norm(evaluate_trial(sp, c, circle_samples(9)), 0.0));
  }
  CHECK(mc <= e.value * (1.0 + 1e-10));
  const VectorXd best = evaluate_trial(sp, e.extremizer, circle_samples(12));
  CHECK(best.cwiseAbs().maxCoeff() / circle_spectral_norm(evaluate_trial(sp, e.extremizer, circle_samples(9)), 0.0) ==
        doctest::Approx(e.value).epsilon(1e-8));
  CHECK_THROWS_AS(manifold_nikolskii_constant(sp, 5, 12), InvalidArgument);
}
