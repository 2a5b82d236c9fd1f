#include "kerninv/manifold.hpp"

#include "kerninv/sobolev.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace kerninv {

namespace {

ConstantEstimate circle_summary(const TrialSpace& space, double s_upper) {
  if (!space.on_manifold()) throw InvalidArgument("manifold estimator needs a circle trial space");
  ConstantEstimate e;
  e.s_upper = s_upper;
  e.n = space.size();
  e.h = space.nodes().h;
  e.q = space.nodes().q;
  e.rho = space.nodes().rho;
  e.m = space.kernel().m();
  return e;
}

}  // namespace

double BandExtension::operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  const Eigen::Vector2d p = closest_point(x, Manifold{});
  return base(p);
}

BandExtension extend_constant_normal(ScalarField u, double delta) {
  return BandExtension{std::move(u), delta, tubular_domain(Manifold{}, delta)};
}

double equivalence_ratio_extension(const ScalarField& u, double delta, int level) {
  const BandExtension ext = extend_constant_normal(u, delta);
  const QuadratureRule band = build_rule(Host{ext.band}, level);
  const QuadratureRule circle = build_rule(Host{Manifold{}}, level);
  const double ambient = lq_norm(band, [&](const auto& x) { return ext(x); }, 2.0);
  const double intrinsic = lq_norm(circle, u, 2.0);
  return ambient / (std::sqrt(2.0 * delta) * intrinsic);
}

bool trial_equivalence_admissible(double beta, double tau) {
  return beta >= 0.0 && beta <= std::floor(tau - 0.5 + 1e-12) + 1e-12;
}

double trial_equivalence_ratio(const TrialSpace& space, const VectorXd& coeffs, double delta, double beta,
                               int band_level, int K) {
  if (!space.on_manifold()) throw InvalidArgument("trial equivalence needs a circle trial space");
  if (!trial_equivalence_admissible(beta, space.smoothness())) {
    std::ostringstream os;
    os << "band equivalence order beta = " << beta << " must satisfy 0 <= beta <= floor(tau - 1/2) = "
       << std::floor(space.smoothness() - 0.5 + 1e-12);
    throw InvalidArgument(os.str());
  }
  const Domain band = tubular_domain(Manifold{}, delta);
  if (coeffs.isZero(0.0)) return 1.0;
  const QuadratureRule rule = build_rule(Host{band}, band_level);
  const double ambient = trial_full_norm(space, coeffs, beta, 2.0, rule);
  const VectorXd samples = evaluate_trial(space, coeffs, circle_samples(K));
  const double intrinsic = circle_spectral_norm(samples, beta);
  return ambient / (std::sqrt(delta) * intrinsic);
}

PoincareResult poincare_check(const std::function<double(double)>& f, const std::function<double(double)>& df,
                              double delta, double p) {
  if (!(p >= 1.0)) throw InvalidArgument("Poincare exponent must satisfy p >= 1");
  if (!(delta > 0.0)) throw InvalidArgument("Poincare half-width must be positive");
  const QuadratureRule rule = build_rule(Host{make_interval(-delta, delta)}, 6);
  double int_f = 0.0, int_df = 0.0;
  for (Eigen::Index i = 0; i < rule.size(); ++i) {
    const double x = rule.nodes(i, 0);
    int_f += rule.weights(i) * std::pow(std::abs(f(x)), p);
    int_df += rule.weights(i) * std::pow(std::abs(df(x)), p);
  }
  PoincareResult r;
  const double c = std::pow(2.0, p - 1.0);
  r.lhs = std::pow(std::abs(f(0.0)), p);
  r.rhs = c / (2.0 * delta) * int_f + c * std::pow(delta, p - 1.0) * int_df;
  r.holds = r.lhs <= r.rhs * (1.0 + 1e-10);
  return r;
}

bool manifold_bernstein_admissible(double beta, double tau) {
  const double tol = 1e-12;
  const bool upper_range = beta > 0.5 * Manifold::intrinsic_dim + tol && beta <= tau + tol;
  return upper_range || trial_equivalence_admissible(beta, tau);
}

ConstantEstimate manifold_bernstein_constant(const TrialSpace& space, double beta, int K) {
  ConstantEstimate e = circle_summary(space, beta);
  if (!manifold_bernstein_admissible(beta, space.smoothness())) {
    std::ostringstream os;
    os << "manifold Bernstein order beta = " << beta
       << " is outside the admissible set: need d_M/2 < beta <= tau or 0 <= beta <= floor(tau - 1/2)";
    throw InvalidArgument(os.str());
  }
  if (beta == 0.0) {
    e.value = 1.0;
    e.diag_ratio = 1.0;
    e.extremizer = VectorXd::Unit(space.size(), 0);
    return e;
  }
  const MatrixXd numerator = circle_sobolev_gram(space, beta, K).matrix;
  const SquareRoot root = circle_l2_root(space, K);
  const auto top = top_generalized_eigen(numerator, root);
  e.value = std::sqrt(std::max(top.lambda, 0.0));
  e.extremizer = top.extremizer;
  e.jitter = root.jitter;
  e.jitter_escalations = root.escalations;
  e.cholesky_fallback = root.via_cholesky;
  e.diag_ratio = root.diag_ratio();
  return e;
}

ConstantEstimate manifold_nikolskii_constant(const TrialSpace& space, int K, int eval_exponent) {
  ConstantEstimate e = circle_summary(space, 0.0);
  if (K < 6) throw InvalidArgument("spectral norm needs a power-of-two sample count >= 64");
  const SquareRoot root = circle_l2_root(space, K);
  e.jitter = root.jitter;
  e.jitter_escalations = root.escalations;
  e.cholesky_fallback = root.via_cholesky;
  e.diag_ratio = root.diag_ratio();
  const PointsXd grid = circle_samples(eval_exponent);
  const auto rt = root.r.triangularView<Eigen::Upper>().transpose();
  constexpr Eigen::Index kChunk = 4096;
  MatrixXd k;
  double best = -1.0;
  VectorXd best_z;
  for (Eigen::Index start = 0; start < grid.rows(); start += kChunk) {
    const Eigen::Index c = std::min(kChunk, grid.rows() - start);
    space.basis_block(grid, start, c, {0, 0}, k);
    const MatrixXd z = rt.solve(MatrixXd(k.transpose()));
    Eigen::Index arg = 0;
    const double v = z.colwise().squaredNorm().maxCoeff(&arg);
    if (v > best) {
      best = v;
      best_z = z.col(arg);
    }
  }
  e.value = std::sqrt(best);
  e.extremizer = root.r.triangularView<Eigen::Upper>().solve(best_z / best_z.norm());
  return e;
}

}  // namespace kerninv
