#include "kerninv/kernels.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace kerninv;
using namespace kerninv::testing;

namespace {

Eigen::VectorXd v1(double x) { return Eigen::VectorXd::Constant(1, x); }

double nu_to_m(double nu, int dim) { return nu + 0.5 * dim; }

}  // namespace

TEST_CASE("closed-form profiles") {
  CHECK(MaternKernel(1.0, 1)(v1(1.0), v1(0.0)) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(MaternKernel(2.0, 1)(v1(0.3), v1(0.3)) == 1.0);
  CHECK(MaternKernel(3.5, 2).profile(2.0) == doctest::Approx((1.0 + 2.0 + 4.0 / 3.0) * std::exp(-2.0)));

  for (const auto& row : fixtures()["matern_bessel"]) {
    const double nu = row["nu"], r = row["r"];
    const MaternKernel k(nu_to_m(nu, 1), 1);
    CHECK(std::abs(k.profile(r) - row["value"].get<double>()) <= 1e-12);
  }
}

TEST_CASE("supported smoothness") {
  CHECK(supported_smoothness(1) == std::vector<double>{1.0, 2.0, 3.0, 4.0});
  CHECK(supported_smoothness(2) == std::vector<double>{1.5, 2.5, 3.5, 4.5});
  CHECK_THROWS_AS(MaternKernel(2.5, 1), InvalidArgument);
  CHECK_THROWS_AS(MaternKernel(5.0, 1), InvalidArgument);
  CHECK_THROWS_AS(MaternKernel(2.0, 2), InvalidArgument);
}

TEST_CASE("first derivatives in one dimension") {
  const MaternKernel k(2.0, 1);
  CHECK(k.derivative({1, 0}, v1(0.4), v1(0.4)) == 0.0);
  CHECK(k.derivative({1, 0}, v1(1.0), v1(0.0)) == doctest::Approx(-std::exp(-1.0)).epsilon(1e-14));
  CHECK_THROWS_AS(k.derivative({3, 0}, v1(1.0), v1(0.0)), InvalidArgument);
}

TEST_CASE("analytic derivatives match central differences") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  const double step = 1e-4;
  for (int dim : {1, 2})
    for (double m : supported_smoothness(dim)) {
      const MaternKernel k(m, dim);
      const Eigen::VectorXd y = Eigen::VectorXd::Zero(dim);
      for (int order = 1; order <= k.max_derivative_order(); ++order)
        for (const auto& alpha : multi_indices(order, dim)) {
          // lower-order derivative to difference, along the last axis that alpha uses
          const int axis = (dim == 2 && alpha[1] > 0) ? 1 : 0;
          MultiIndex lower = alpha;
          --lower[axis];
          double worst = 0.0;
          for (int trial = 0; trial < 100; ++trial) {
            Eigen::VectorXd x(dim);
            for (int a = 0; a < dim; ++a) x(a) = u(rng);
            if (x.norm() < 0.05) x(0) += 0.3;
            Eigen::VectorXd xp = x, xm = x;
            xp(axis) += step;
            xm(axis) -= step;
            const double fd = (k.derivative(lower, xp, y) - k.derivative(lower, xm, y)) / (2.0 * step);
            const double exact = k.derivative(alpha, x, y);
            worst = std::max(worst, std::abs(fd - exact) / std::max(1.0, std::abs(exact)));
          }
          INFO("m = " << m << ", d = " << dim << ", alpha = (" << alpha[0] << "," << alpha[1] << ")");
          CHECK(worst <= 1e-5);
        }
    }

  // the second derivative of nu = 5/2 in the plane to 1e-6 against a direct second difference
  const MaternKernel k(3.5, 2);
  const Eigen::Vector2d x(0.37, -0.81), y(0.0, 0.0);
  const double h = 1e-4;
  const double fd = (k(x + Eigen::Vector2d(h, 0), y) - 2.0 * k(x, y) + k(x - Eigen::Vector2d(h, 0), y)) / (h * h);
  CHECK(std::abs(fd - k.derivative({2, 0}, x, y)) <= 1e-6);
}

TEST_CASE("derivative terms vanish appropriately at r = 0") {
  const MaternKernel k(3.0, 1);
  const auto x = v1(0.2);
  CHECK(k.derivative({1, 0}, x, x) == 0.0);
  CHECK(k.derivative({3, 0}, x, x) == 0.0);
  // nu = 5/2: phi(r) = 1 - r^2/6 + O(r^3)
  CHECK(k.derivative({2, 0}, x, x) == doctest::Approx(-1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("gram matrix") {
  const Host I = unit_interval();
  const TrialSpace one(MaternKernel(2.0, 1), make_point_set(line_points({0.5}), I));
  CHECK(gram_matrix(one) == MatrixXd::Ones(1, 1));

  const TrialSpace two(MaternKernel(1.0, 1), make_point_set(line_points({-0.5, 0.5}), make_interval(-1.0, 1.0)));
  const MatrixXd g = gram_matrix(two);
  CHECK(g(0, 0) == 1.0);
  CHECK(g(0, 1) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(g(0, 1) == g(1, 0));

  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u;
  PointsXd p(32, 2);
  for (Eigen::Index i = 0; i < 32; ++i) p.row(i) << u(rng), u(rng);
  const TrialSpace rnd(MaternKernel(2.5, 2), make_point_set(p, unit_square()));
  const MatrixXd gr = gram_matrix(rnd);
  CHECK((gr - gr.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((gr.diagonal().array() == 1.0).all());
  const auto chol = jittered_cholesky(gr);
  CHECK(chol.llt.info() == Eigen::Success);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(gr + chol.jitter * MatrixXd::Identity(32, 32));
  CHECK(es.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("jitter escalates and eventually fails") {
  MatrixXd a = MatrixXd::Zero(3, 3);
  a(0, 0) = 1.0;
  a(1, 1) = 1.0;
  a(2, 2) = -1.0;
  CHECK_THROWS_AS(jittered_cholesky(a), NumericalError);

  MatrixXd b = MatrixXd::Ones(4, 4);  // rank one, PSD
  const auto c = jittered_cholesky(b, true);
  CHECK(c.jitter > 0.0);
  CHECK(c.llt.info() == Eigen::Success);
}

TEST_CASE("interpolation") {
  const Host I = unit_interval();
  const TrialSpace sp(MaternKernel(2.0, 1), uniform_refinement(I, 4));
  const MatrixXd g = gram_matrix(sp);
  const VectorXd e1 = VectorXd::Unit(sp.size(), 0);
  CHECK((interpolate(sp, g * e1) - e1).cwiseAbs().maxCoeff() <= 1e-9);
  CHECK(interpolate(sp, VectorXd::Zero(sp.size())).isZero(0.0));

  std::mt19937_64 rng(31);
  std::normal_distribution<double> n;
  VectorXd v(sp.size());
  for (auto& x : v) x = n(rng);
  const VectorXd c = interpolate(sp, v);
  CHECK((g * c - v).norm() <= 1e-10 * v.norm());
  CHECK((evaluate_trial(sp, c, sp.nodes().points) - v).cwiseAbs().maxCoeff() <= 1e-10 * v.cwiseAbs().maxCoeff());
  CHECK_THROWS_AS(interpolate(sp, VectorXd::Zero(3)), InvalidArgument);
}

TEST_CASE("evaluate_trial against a double loop") {
  const TrialSpace sp(MaternKernel(2.5, 2), uniform_refinement(unit_square(), 2));
  const VectorXd e3 = VectorXd::Unit(sp.size(), 3);
  CHECK(evaluate_trial(sp, e3, sp.nodes().points.row(3))(0) == 1.0);

  std::mt19937_64 rng(37);
  std::normal_distribution<double> n;
  VectorXd c1(sp.size()), c2(sp.size());
  for (auto& x : c1) x = n(rng);
  for (auto& x : c2) x = n(rng);
  const PointsXd pts = candidate_grid(unit_square(), 200);
  const VectorXd sum = evaluate_trial(sp, c1 + c2, pts);
  CHECK((sum - evaluate_trial(sp, c1, pts) - evaluate_trial(sp, c2, pts)).cwiseAbs().maxCoeff() <= 1e-12);
  for (Eigen::Index i = 0; i < pts.rows(); i += 17) {
    double ref = 0.0;
    for (Eigen::Index j = 0; j < sp.size(); ++j)
      ref += c1(j) * sp.kernel()(pts.row(i).transpose(), sp.nodes().points.row(j).transpose());
    CHECK(evaluate_trial(sp, c1, pts.row(i))(0) == doctest::Approx(ref).epsilon(1e-13));
  }
  const VectorXd dx = evaluate_trial(sp, c1, pts, {1, 0});
  CHECK(dx.size() == pts.rows());
}

TEST_CASE("restricted kernel") {
  const RestrictedKernel r = restrict_kernel(MaternKernel(2.5, 2), Manifold{});
  CHECK(r.tau == 2.0);
  CHECK(r.angular(0.7, 0.7) == 1.0);
  CHECK(r.angular(0.0, std::numbers::pi) == doctest::Approx(r.base.profile(2.0)).epsilon(1e-15));
  const Eigen::Vector2d a(std::cos(0.3), std::sin(0.3)), b(std::cos(2.0), std::sin(2.0));
  CHECK(r(a, b) == r.base(a, b));
  CHECK(restrict_kernel(MaternKernel(1.5, 2), Manifold{}).tau == 1.0);
  CHECK_THROWS_AS(restrict_kernel(MaternKernel(2.0, 1), Manifold{}), InvalidArgument);

  const TrialSpace sp(MaternKernel(2.5, 2), uniform_refinement(Manifold{}, 3));
  CHECK(sp.on_manifold());
  CHECK(sp.smoothness() == 2.0);
}

TEST_CASE("scalar amplitude scales every kernel value") {
  const MaternKernel a(2.0, 1), b(2.0, 1, 3.0);
  for (double r : {0.0, 0.3, 1.7}) {
    CHECK(b.profile(r) == doctest::Approx(3.0 * a.profile(r)).epsilon(1e-15));
    CHECK(b.derivative({2, 0}, v1(r), v1(0.0)) == doctest::Approx(3.0 * a.derivative({2, 0}, v1(r), v1(0.0))));
  }
}
