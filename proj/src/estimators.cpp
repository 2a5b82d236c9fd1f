#include "kerninv/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace kerninv {

namespace {

ConstantEstimate summary(const TrialSpace& space, double s_upper, double s_lower) {
  ConstantEstimate e;
  e.s_upper = s_upper;
  e.s_lower = s_lower;
  e.n = space.size();
  e.h = space.nodes().h;
  e.q = space.nodes().q;
  e.rho = space.nodes().rho;
  e.m = space.kernel().m();
  return e;
}

void record_root(ConstantEstimate& e, const SquareRoot& root) {
  e.jitter = root.jitter;
  e.jitter_escalations = root.escalations;
  e.cholesky_fallback = root.via_cholesky;
  e.diag_ratio = root.diag_ratio();
}

void require_domain_space(const TrialSpace& space) {
  if (space.on_manifold())
    throw InvalidArgument("domain estimator called on a circle space; use the manifold estimators");
}

MatrixXd full_norm_sum(const IntegerAssembly& a, int k) {
  MatrixXd g = a.seminorms[0];
  for (int j = 1; j <= k; ++j) g += a.seminorms[static_cast<std::size_t>(j)];
  return g;
}

bool is_integer(double x) { return std::abs(x - std::round(x)) < 1e-12; }

double pos(double x) { return x > 0.0 ? x : 0.0; }

double inv_or_zero(double p) { return std::isinf(p) ? 0.0 : 1.0 / p; }

// Sum over |alpha| = k of the squared L2 norms of D^alpha u.
double integer_seminorm_sq(const TrialSpace& space, const VectorXd& c, int k, const QuadratureRule& rule) {
  double sum = 0.0;
  for (const auto& alpha : multi_indices(k, space.kernel().dim())) {
    const double v = lq_norm_values(rule, evaluate_trial(space, c, rule.nodes, alpha), 2.0);
    sum += v * v;
  }
  return sum;
}

}  // namespace

ConstantEstimate ratio_constant(const TrialSpace& space, double s_upper, double s_lower,
                                const QuadratureRule& rule) {
  require_domain_space(space);
  const double m = space.kernel().m();
  if (!(s_lower >= 0.0 && s_lower <= s_upper && s_upper <= m + 1e-12))
    throw InvalidArgument("orders must satisfy 0 <= s_lower <= s_upper <= m");
  ConstantEstimate e = summary(space, s_upper, s_lower);
  if (s_upper == s_lower) {
    // Identical pencil.
    e.value = 1.0;
    e.diag_ratio = 1.0;
    e.extremizer = VectorXd::Unit(space.size(), 0);
    return e;
  }
  const auto up = split_order(s_upper);
  const auto lo = split_order(s_lower);
  const auto assembled = assemble_integer_grams(space, up.k, rule, lo.t == 0.0 ? lo.k : -1);
  MatrixXd numerator = full_norm_sum(assembled, up.k);
  if (up.t > 0.0) numerator += gagliardo_seminorm_gram(space, up.k, up.t, rule).matrix;
  SquareRoot root;
  if (lo.t == 0.0) {
    root = *assembled.root;
  } else {
    MatrixXd den = full_norm_sum(assembled, lo.k);
    den += gagliardo_seminorm_gram(space, lo.k, lo.t, rule).matrix;
    root = square_root_from_gram(den);
  }
  const auto top = top_generalized_eigen(numerator, root);
  e.value = std::sqrt(std::max(top.lambda, 0.0));
  e.extremizer = top.extremizer;
  record_root(e, root);
  return e;
}

bool bernstein_admissible(double s, double m, int dim) {
  const double tol = 1e-12;
  const bool upper_range = s > 0.5 * dim + tol && s <= m + tol;
  const bool lower_range = s >= -tol && s <= std::floor(m + tol) + tol;
  return upper_range || lower_range;
}

ConstantEstimate bernstein_constant(const TrialSpace& space, double s, const QuadratureRule& rule) {
  if (!bernstein_admissible(s, space.kernel().m(), space.kernel().dim())) {
    std::ostringstream os;
    os << "Bernstein order s = " << s << " is outside the admissible set: need d/2 < s <= m or 0 <= s <= floor(m)";
    throw InvalidArgument(os.str());
  }
  return ratio_constant(space, s, 0.0, rule);
}

ConstantEstimate nikolskii_constant(const TrialSpace& space, const QuadratureRule& rule,
                                    const PointsXd& eval_grid) {
  require_domain_space(space);
  if (eval_grid.rows() < 8 * space.size())
    throw InvalidArgument("Nikolskii evaluation grid needs at least 8 points per node");
  ConstantEstimate e = summary(space, 0.0, 0.0);
  const auto assembled = assemble_integer_grams(space, 0, rule, 0);
  const SquareRoot& root = *assembled.root;
  record_root(e, root);
  const auto rt = root.r.triangularView<Eigen::Upper>().transpose();
  constexpr Eigen::Index kChunk = 4096;
  MatrixXd k;
  double best = -1.0;
  VectorXd best_z;
  for (Eigen::Index start = 0; start < eval_grid.rows(); start += kChunk) {
    const Eigen::Index c = std::min(kChunk, eval_grid.rows() - start);
    space.basis_block(eval_grid, start, c, {0, 0}, k);
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

ConstantEstimate stability_constant(const TrialSpace& space, double s, const QuadratureRule& rule) {
  require_domain_space(space);
  const double m = space.kernel().m();
  if (!(s >= 0.0 && s <= std::floor(m + 1e-12) + 1e-12))
    throw InvalidArgument("stability order must satisfy 0 <= s <= floor(m)");
  ConstantEstimate e = summary(space, s, 0.0);
  const auto split = split_order(s);
  MatrixXd numerator;
  if (split.t == 0.0) {
    numerator = assemble_integer_grams(space, split.k, rule).seminorms.back();
  } else {
    numerator = gagliardo_seminorm_gram(space, split.k, split.t, rule).matrix;
  }
  const SquareRoot root = square_root_from_rows(gram_matrix(space));
  const auto top = top_generalized_eigen(numerator, root);
  e.value = std::sqrt(std::max(top.lambda, 0.0));
  e.extremizer = top.extremizer;
  record_root(e, root);
  return e;
}

double stability_normalized(const ConstantEstimate& e, int dim) {
  const double half_d = 0.5 * dim;
  return e.value / ((1.0 + std::pow(e.rho, e.m - half_d)) * std::pow(e.h, half_d - e.s_upper));
}

ConstantEstimate native_inverse_constant(const TrialSpace& space, const QuadratureRule& rule) {
  require_domain_space(space);
  const double m = space.kernel().m();
  ConstantEstimate e = summary(space, m, 0.0);
  const MatrixXd numerator = h_norm_gram(space, m, rule).matrix;
  const SquareRoot root = square_root_from_rows(gram_matrix(space));
  const auto top = top_generalized_eigen(numerator, root);
  e.value = std::sqrt(std::max(top.lambda, 0.0));
  e.extremizer = top.extremizer;
  record_root(e, root);
  return e;
}

double trial_seminorm(const TrialSpace& space, const VectorXd& coeffs, double s, double q,
                      const QuadratureRule& rule) {
  const auto split = split_order(s);
  if (split.t > 0.0) {
    if (q != 2.0) throw InvalidArgument("fractional seminorms are available for q = 2 only");
    const auto g = gagliardo_seminorm_gram(space, split.k, split.t, rule);
    return std::sqrt(std::max(coeffs.dot(g.matrix * coeffs), 0.0));
  }
  const int dim = space.kernel().dim();
  if (q == 2.0) return std::sqrt(integer_seminorm_sq(space, coeffs, split.k, rule));
  if (q == 1.0) {
    double sum = 0.0;
    for (const auto& alpha : multi_indices(split.k, dim))
      sum += lq_norm_values(rule, evaluate_trial(space, coeffs, rule.nodes, alpha), 1.0);
    return sum;
  }
  if (std::isinf(q) && q > 0.0) {
    const PointsXd grid = sup_grid(rule.host, 4 * rule.size());
    double best = 0.0;
    for (const auto& alpha : multi_indices(split.k, dim))
      best = std::max(best, evaluate_trial(space, coeffs, grid, alpha).cwiseAbs().maxCoeff());
    return best;
  }
  throw InvalidArgument("unsupported norm exponent (use 1, 2 or inf)");
}

double trial_full_norm(const TrialSpace& space, const VectorXd& coeffs, double s, double p,
                       const QuadratureRule& rule) {
  const auto split = split_order(s);
  if (p == 2.0) {
    double sum = 0.0;
    for (int j = 0; j <= split.k; ++j) sum += integer_seminorm_sq(space, coeffs, j, rule);
    if (split.t > 0.0) {
      const double frac = trial_seminorm(space, coeffs, s, 2.0, rule);
      sum += frac * frac;
    }
    return std::sqrt(sum);
  }
  if (split.t > 0.0) throw InvalidArgument("fractional Sobolev norms are available for p = 2 only");
  if (p == 1.0) {
    double sum = 0.0;
    for (int j = 0; j <= split.k; ++j) sum += trial_seminorm(space, coeffs, j, 1.0, rule);
    return sum;
  }
  if (std::isinf(p) && p > 0.0) {
    double best = 0.0;
    for (int j = 0; j <= split.k; ++j) best = std::max(best, trial_seminorm(space, coeffs, j, p, rule));
    return best;
  }
  throw InvalidArgument("unsupported norm exponent (use 1, 2 or inf)");
}

SamplingOrder sampling_order(double m, int dim, double p, double q, double rho) {
  SamplingOrder o;
  o.l0 = m - dim * pos(inv_or_zero(p) - inv_or_zero(q));
  o.gamma = std::max({p, q, rho});
  const bool m_natural = m >= 1.0 && is_integer(m);
  const bool exact = m_natural && ((p < q && !std::isinf(q) && is_integer(o.l0)) ||
                                   (p == 1.0 && std::isinf(q)) || p == q);
  o.l = exact ? std::round(o.l0) : std::ceil(o.l0 - 1e-12) - 1.0;
  return o;
}

SamplingResult sampling_residual(const TrialSpace& space, const VectorXd& coeffs, double s, double q_norm,
                                 const QuadratureRule& rule, double p, double rho) {
  require_domain_space(space);
  const double m = space.kernel().m();
  const int d = space.kernel().dim();
  auto valid = [](double x) { return x == 1.0 || x == 2.0 || (std::isinf(x) && x > 0.0); };
  if (!valid(p) || !valid(q_norm) || !valid(rho))
    throw InvalidArgument("sampling norms must use exponents 1, 2 or inf");
  if ((p == 1.0 && m < d) || (p == 2.0 && !(m > 0.5 * d)) || (std::isinf(p) && !is_integer(m)))
    throw InvalidArgument("smoothness m is not admissible for this p (need m >= d for p = 1, m > d/p, integer m for p = inf)");
  SamplingResult out;
  out.order = sampling_order(m, d, p, q_norm, rho);
  const double h = space.nodes().h;
  double a, b;
  if (std::isinf(q_norm)) {
    const double kmax = std::ceil(m - d * inv_or_zero(p) - 1e-12) - 1.0;
    if (!is_integer(s) || s < 0.0 || s > kmax + 1e-12) {
      std::ostringstream os;
      os << "sup-norm sampling needs an integer order 0 <= k <= ceil(m - d/p) - 1 = " << kmax;
      throw InvalidArgument(os.str());
    }
    a = m - s - d * inv_or_zero(p);
    b = -s;
  } else {
    if (!(s >= 0.0) || s > out.order.l + 1e-12) {
      std::ostringstream os;
      os << "sampling order s = " << s << " exceeds l = " << out.order.l << " (l0 = " << out.order.l0 << ")";
      throw InvalidArgument(os.str());
    }
    a = m - s - d * pos(inv_or_zero(p) - inv_or_zero(q_norm));
    b = d / out.order.gamma - s;
  }
  if (coeffs.isZero(0.0)) {
    // 0/0 by convention.
    out.zero_function = true;
    return out;
  }
  const VectorXd nodal = evaluate_trial(space, coeffs, space.nodes().points);
  out.lhs = trial_seminorm(space, coeffs, s, q_norm, rule);
  const double wpm = trial_full_norm(space, coeffs, m, p, rule);
  out.smooth_term = std::pow(h, a) * wpm;
  out.discrete_term = std::pow(h, b) * discrete_norm(nodal, rho);
  out.residual = out.lhs / (out.smooth_term + out.discrete_term);

  if (p == 2.0 && rho == 2.0 && s <= std::floor(m + 1e-12) + 1e-12) {
    const double hm = p == 2.0 ? wpm : trial_full_norm(space, coeffs, m, 2.0, rule);
    const double semi = q_norm == 2.0 ? out.lhs : trial_seminorm(space, coeffs, s, 2.0, rule);
    out.special_l2 = semi / (std::pow(h, m - s) * hm + std::pow(h, 0.5 * d - s) * nodal.norm());
    if (std::isinf(q_norm) && s == 0.0)
      out.special_linf = out.lhs / (std::pow(h, m - 0.5 * d) * hm + nodal.norm());
  }
  return out;
}

double gn_interpolation_check(const TrialSpace& space, const VectorXd& coeffs, double t, double alpha,
                              double m_order, const QuadratureRule& rule) {
  require_domain_space(space);
  if (!(t >= 0.0 && t < alpha && alpha < m_order && m_order <= space.kernel().m() + 1e-12))
    throw InvalidArgument("interpolation orders must satisfy 0 <= t < alpha < m_order <= m (theta in (0, 1))");
  const double theta = (alpha - t) / (m_order - t);
  if (coeffs.isZero(0.0)) return 0.0;
  const double na = trial_full_norm(space, coeffs, alpha, 2.0, rule);
  const double nt = trial_full_norm(space, coeffs, t, 2.0, rule);
  const double nm = trial_full_norm(space, coeffs, m_order, 2.0, rule);
  return na / (std::pow(nt, 1.0 - theta) * std::pow(nm, theta));
}

ExponentFit fit_exponent(const std::vector<std::pair<double, double>>& pairs, std::size_t min_pairs) {
  if (min_pairs < 2) min_pairs = 2;
  if (pairs.size() < min_pairs) {
    std::ostringstream os;
    os << "exponent fit needs at least " << min_pairs << " pairs (got " << pairs.size() << ")";
    throw InvalidArgument(os.str());
  }
  for (const auto& [scale, value] : pairs)
    if (!(scale > 0.0) || !(value > 0.0) || !std::isfinite(scale) || !std::isfinite(value))
      throw InvalidArgument("exponent fit needs positive finite scales and values");
  const bool increasing = pairs[1].first > pairs[0].first;
  for (std::size_t i = 1; i < pairs.size(); ++i)
    if ((pairs[i].first > pairs[i - 1].first) != increasing || pairs[i].first == pairs[i - 1].first)
      throw InvalidArgument("exponent fit needs strictly monotone scales");
  const auto n = static_cast<double>(pairs.size());
  double mx = 0.0, my = 0.0;
  for (const auto& [s, v] : pairs) {
    mx += std::log(s);
    my += std::log(v);
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [s, v] : pairs) {
    const double dx = std::log(s) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(v) - my);
  }
  ExponentFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ssr = 0.0;
  for (const auto& [s, v] : pairs) {
    const double r = std::log(v) - (fit.intercept + fit.slope * std::log(s));
    ssr += r * r;
  }
  fit.stderr_slope = pairs.size() > 2 ? std::sqrt(ssr / (n - 2.0) / sxx) : 0.0;
  return fit;
}

VectorXd random_trial_coefficients(const TrialSpace& space, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  VectorXd values(space.size());
  for (Eigen::Index i = 0; i < values.size(); ++i) values(i) = normal(rng);
  return interpolate(space, values);
}

}  // namespace kerninv
