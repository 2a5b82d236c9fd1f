#include "kerninv/quadrature.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace kerninv;
using namespace kerninv::testing;

namespace {

constexpr double kPi = std::numbers::pi;

double sum_weights(const QuadratureRule& r) { return r.weights.sum(); }

}  // namespace

TEST_CASE("rules integrate constants exactly") {
  CHECK(sum_weights(build_rule(unit_interval(), 1)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(sum_weights(build_rule(make_interval(-2.0, 3.0), 3)) == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(sum_weights(build_rule(unit_square(), 2)) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(sum_weights(build_rule(make_disk({0.5, -1.0}, 2.0), 2)) == doctest::Approx(4.0 * kPi).epsilon(1e-12));
  CHECK(std::abs(sum_weights(build_rule(make_annulus(0.9, 1.1), 1)) - 4.0 * kPi * 0.1) <= 1e-12);
  CHECK(sum_weights(build_rule(make_annulus(0.2, 3.0), 2)) == doctest::Approx(kPi * (9.0 - 0.04)).epsilon(1e-12));
  CHECK(sum_weights(build_rule(Manifold{}, 1)) == doctest::Approx(2.0 * kPi).epsilon(1e-14));
}

TEST_CASE("rule nodes lie in the host with positive weights") {
  for (const Host& h : {unit_interval(), unit_square(), Host{make_disk({0.0, 0.0}, 1.0)},
                        Host{make_annulus(0.5, 1.0)}}) {
    const QuadratureRule r = build_rule(h, 2);
    CHECK((r.weights.array() > 0.0).all());
    const Domain& d = std::get<Domain>(h);
    for (Eigen::Index i = 0; i < r.size(); ++i) CHECK(d.contains(r.nodes.row(i).transpose()));
  }
  const QuadratureRule c = build_rule(Manifold{}, 2);
  CHECK(c.size() == 64);
  CHECK((c.nodes.rowwise().norm().array() - 1.0).abs().maxCoeff() <= 1e-15);
}

TEST_CASE("Gauss panels are exact up to degree 15") {
  const QuadratureRule r = build_rule(unit_interval(), 1);
  for (int j = 0; j <= 15; ++j) {
    const double approx = lq_norm(r, [j](const auto& x) { return std::pow(x(0), j); }, 1.0);
    CHECK(approx == doctest::Approx(1.0 / (j + 1)).epsilon(1e-14));
  }
}

TEST_CASE("circle rule is spectrally accurate") {
  const QuadratureRule r = build_rule(Manifold{}, 1);
  const double v = lq_norm(r, [](const auto& x) { return x(0) * x(0); }, 1.0);
  CHECK(std::abs(v - kPi) <= 1e-14);
}

TEST_CASE("lq norms") {
  const QuadratureRule r = build_rule(unit_interval(), 2);
  CHECK(lq_norm(r, [](const auto&) { return 1.0; }, 2.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(lq_norm(r, [](const auto& x) { return x(0); }, 2.0) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-14));
  const double sup = lq_norm(build_rule(Manifold{}, 2), [](const auto& x) { return x(1); }, kInf);
  CHECK(std::abs(sup - 1.0) <= 1e-6);
  CHECK_THROWS_AS(lq_norm(r, [](const auto&) { return 1.0; }, 3.0), InvalidArgument);

  // q = 2 equals the square root of the q = 1 norm of f^2
  auto f = [](const auto& x) { return std::exp(x(0)) * std::abs(std::sin(3.0 * x(1))); };
  for (const Host& h : {unit_square(), Host{make_disk({0.0, 0.0}, 1.0)}}) {
    const QuadratureRule q = build_rule(h, 2);
    const double l2 = lq_norm(q, f, 2.0);
    const double l1sq = lq_norm(q, [&](const auto& x) { return f(x) * f(x); }, 1.0);
    CHECK(l2 == doctest::Approx(std::sqrt(l1sq)).epsilon(1e-14));
  }
}

TEST_CASE("sup norm grows monotonically under grid refinement") {
  auto f = [](const auto& x) { return std::sin(17.0 * x(0)) * std::cos(5.0 * x(1)); };
  double prev = 0.0;
  for (int k = 1; k <= 4; ++k) {
    const double v = lq_norm(build_rule(unit_square(), k), f, kInf);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("discrete norms carry no 1/N factor") {
  CHECK(discrete_norm(Eigen::Vector2d(3.0, 4.0), 2.0) == 5.0);
  CHECK(discrete_norm(VectorXd::Ones(4), 2.0) == 2.0);
  CHECK(discrete_norm(Eigen::Vector2d(-2.0, 1.0), kInf) == 2.0);
  CHECK(discrete_norm(Eigen::Vector2d(-2.0, 1.0), 1.0) == 3.0);
  CHECK_THROWS_AS(discrete_norm(VectorXd(0), 2.0), InvalidArgument);
}

TEST_CASE("refinement errors decrease for smooth integrands") {
  auto f = [](const auto& x) { return std::exp(-x(0)) * std::cos(4.0 * x(0) + x(1)); };
  for (const Host& h : {unit_square(), Host{make_disk({0.0, 0.0}, 1.0)}, Host{make_annulus(0.5, 1.0)}}) {
    std::vector<double> v;
    for (int k = 1; k <= 6; ++k) v.push_back(lq_norm(build_rule(h, k), f, 2.0));
    const double ref = v.back();
    // beyond level 3 successive differences shrink (or sit at roundoff)
    for (std::size_t k = 3; k + 2 < v.size(); ++k)
      CHECK(std::abs(v[k + 1] - v[k]) <= std::max(std::abs(v[k] - v[k - 1]), 1e-14 * ref));
  }
}

TEST_CASE("offset rules") {
  for (const Host& h : {unit_interval(), unit_square(), Host{make_annulus(0.9, 1.1)}, Host{Manifold{}}}) {
    const QuadratureRule r = build_rule(h, 2);
    const QuadratureRule o = offset_rule(r);
    CHECK(o.weights.sum() == doctest::Approx(r.weights.sum()).epsilon(1e-13));
    double closest = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < r.size(); ++i)
      for (Eigen::Index j = 0; j < o.size(); j += 3) closest = std::min(closest, (r.nodes.row(i) - o.nodes.row(j)).norm());
    CHECK(closest > 0.0);
  }
}

TEST_CASE("rule errors") {
  CHECK_THROWS_AS(build_rule(unit_interval(), 0), InvalidArgument);
  CHECK_THROWS_WITH_AS(build_rule(unit_square(), 12), "quadrature rule exceeds 1e7 nodes", InvalidArgument);
  VectorXd x, w;
  gauss_legendre(8, x, w);
  CHECK(w.sum() == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(x(0) < x(7));
  CHECK(pairwise_sum(w.data(), w.size()) == doctest::Approx(2.0).epsilon(1e-15));
}
