#include "kerninv/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace kerninv {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

template <typename... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <typename... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// 1D composite rule over the given panel edges.
void composite_1d(const std::vector<double>& edges, VectorXd& x, VectorXd& w) {
  VectorXd g, gw;
  gauss_legendre(kGaussPoints, g, gw);
  const auto panels = static_cast<Eigen::Index>(edges.size()) - 1;
  x.resize(panels * kGaussPoints);
  w.resize(panels * kGaussPoints);
  for (Eigen::Index p = 0; p < panels; ++p) {
    const double a = edges[static_cast<std::size_t>(p)];
    const double b = edges[static_cast<std::size_t>(p + 1)];
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    x.segment(p * kGaussPoints, kGaussPoints) = (mid + half * g.array()).matrix();
    w.segment(p * kGaussPoints, kGaussPoints) = half * gw;
  }
}

std::vector<double> uniform_edges(double a, double b, Eigen::Index panels, bool offset) {
  std::vector<double> e;
  const double hw = (b - a) / static_cast<double>(panels);
  e.push_back(a);
  if (offset) {
    for (Eigen::Index p = 0; p < panels; ++p) e.push_back(a + (static_cast<double>(p) + 0.5) * hw);
  } else {
    for (Eigen::Index p = 1; p < panels; ++p) e.push_back(a + static_cast<double>(p) * hw);
  }
  e.push_back(b);
  return e;
}

void check_size(Eigen::Index n) {
  if (n > kMaxRuleNodes) throw InvalidArgument("quadrature rule exceeds 1e7 nodes");
}

// An even panel count keeps the radial nodes symmetric about the midline; thin bands get
// two panels, wide annuli enough to match the angular spacing.
Eigen::Index annulus_radial_panels(const Annulus& s, int level) {
  const double angular_panel = kGaussPoints * kTwoPi * s.outer / std::ldexp(1.0, level + 4);
  const auto half = static_cast<Eigen::Index>(std::ceil(0.5 * (s.outer - s.inner) / angular_panel - 1e-12));
  return 2 * std::max<Eigen::Index>(1, half);
}

QuadratureRule polar_rule(const Host& host, int level, const VectorXd& radii, const VectorXd& rw,
                          Eigen::Index angles, double angle_shift) {
  check_size(radii.size() * angles);
  QuadratureRule rule;
  rule.host = host;
  rule.level = level;
  rule.nodes.resize(radii.size() * angles, 2);
  rule.weights.resize(radii.size() * angles);
  Eigen::Vector2d c = Eigen::Vector2d::Zero();
  if (const auto* dom = std::get_if<Domain>(&host))
    if (const auto* disk = std::get_if<Disk>(&dom->shape)) c = disk->center;
  const double dt = kTwoPi / static_cast<double>(angles);
  for (Eigen::Index i = 0; i < radii.size(); ++i)
    for (Eigen::Index j = 0; j < angles; ++j) {
      const double t = (static_cast<double>(j) + angle_shift) * dt;
      const Eigen::Index k = i * angles + j;
      rule.nodes.row(k) << c(0) + radii(i) * std::cos(t), c(1) + radii(i) * std::sin(t);
      rule.weights(k) = rw(i) * radii(i) * dt;
    }
  return rule;
}

QuadratureRule make_rule(const Host& host, int level, bool offset) {
  if (level < 1) throw InvalidArgument("quadrature level must be >= 1");
  if (level > 24) throw InvalidArgument("quadrature rule exceeds 1e7 nodes");
  const Eigen::Index panels = Eigen::Index{1} << level;
  const double shift = offset ? 0.5 : 0.0;
  if (std::holds_alternative<Manifold>(host)) {
    const Eigen::Index n = Eigen::Index{1} << (level + 4);
    check_size(n);
    QuadratureRule rule;
    rule.host = host;
    rule.level = level;
    rule.nodes.resize(n, 2);
    rule.weights = VectorXd::Constant(n, kTwoPi / static_cast<double>(n));
    const double r = std::get<Manifold>(host).radius;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double t = kTwoPi * (static_cast<double>(j) + shift) / static_cast<double>(n);
      rule.nodes.row(j) << r * std::cos(t), r * std::sin(t);
    }
    rule.weights *= r;
    return rule;
  }
  const auto& dom = std::get<Domain>(host);
  return std::visit(
      Overloaded{
          [&](const Interval& s) {
            check_size(panels * kGaussPoints);
            QuadratureRule rule;
            rule.host = host;
            rule.level = level;
            VectorXd x, w;
            composite_1d(uniform_edges(s.a, s.b, panels, offset), x, w);
            rule.nodes = x;
            rule.weights = w;
            return rule;
          },
          [&](const Box& s) {
            VectorXd x0, w0, x1, w1;
            composite_1d(uniform_edges(s.lo(0), s.hi(0), panels, offset), x0, w0);
            composite_1d(uniform_edges(s.lo(1), s.hi(1), panels, offset), x1, w1);
            check_size(x0.size() * x1.size());
            QuadratureRule rule;
            rule.host = host;
            rule.level = level;
            rule.nodes.resize(x0.size() * x1.size(), 2);
            rule.weights.resize(x0.size() * x1.size());
            for (Eigen::Index i = 0; i < x0.size(); ++i)
              for (Eigen::Index j = 0; j < x1.size(); ++j) {
                rule.nodes.row(i * x1.size() + j) << x0(i), x1(j);
                rule.weights(i * x1.size() + j) = w0(i) * w1(j);
              }
            return rule;
          },
          [&](const Disk& s) {
            VectorXd r, w;
            composite_1d(uniform_edges(0.0, s.radius, panels, false), r, w);
            return polar_rule(host, level, r, w, Eigen::Index{1} << (level + 6), shift);
          },
          [&](const Annulus& s) {
            VectorXd r, w;
            composite_1d(uniform_edges(s.inner, s.outer, annulus_radial_panels(s, level), false), r, w);
            return polar_rule(host, level, r, w, Eigen::Index{1} << (level + 4), shift);
          },
      },
      dom.shape);
}

}  // namespace

void gauss_legendre(int n, VectorXd& nodes, VectorXd& weights) {
  if (n < 1) throw InvalidArgument("Gauss-Legendre needs n >= 1");
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // Newton iteration from the Chebyshev-like initial guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    nodes(n - 1 - i) = x;
    weights(n - 1 - i) = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

QuadratureRule build_rule(const Host& host, int level) { return make_rule(host, level, false); }

QuadratureRule offset_rule(const QuadratureRule& rule) { return make_rule(rule.host, rule.level, true); }

double panel_width(const QuadratureRule& rule) {
  const double panels = std::ldexp(1.0, rule.level);
  if (std::holds_alternative<Manifold>(rule.host)) return kTwoPi / std::ldexp(1.0, rule.level + 4);
  const auto& dom = std::get<Domain>(rule.host);
  return std::visit(Overloaded{
                        [&](const Interval& s) { return (s.b - s.a) / panels; },
                        [&](const Box& s) { return (s.hi - s.lo).maxCoeff() / panels; },
                        [&](const Disk& s) { return s.radius / panels; },
                        [&](const Annulus& s) {
                          return (s.outer - s.inner) / static_cast<double>(annulus_radial_panels(s, rule.level));
                        },
                    },
                    dom.shape);
}

PointsXd sup_grid(const Host& host, Eigen::Index min_points) {
  PointsXd g = candidate_grid(host, static_cast<std::size_t>(std::max<Eigen::Index>(min_points, 2)));
  return g;
}

double pairwise_sum(const double* data, Eigen::Index n) {
  if (n <= 16) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) s += data[i];
    return s;
  }
  const Eigen::Index half = n / 2;
  return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

double lq_norm_values(const QuadratureRule& rule, const VectorXd& values, double q) {
  if (values.size() != rule.size()) throw InvalidArgument("value count does not match rule size");
  if (q == 1.0 || q == 2.0) {
    VectorXd terms = q == 1.0 ? VectorXd(rule.weights.cwiseProduct(values.cwiseAbs()))
                              : VectorXd(rule.weights.cwiseProduct(values.cwiseAbs2()));
    const double s = pairwise_sum(terms.data(), terms.size());
    return q == 1.0 ? s : std::sqrt(s);
  }
  if (std::isinf(q)) return values.cwiseAbs().maxCoeff();
  throw InvalidArgument("unsupported norm exponent (use 1, 2 or inf)");
}

double lq_norm(const QuadratureRule& rule, const ScalarField& f, double q) {
  if (std::isinf(q) && q > 0) {
    const PointsXd grid = sup_grid(rule.host, 4 * rule.size());
    double best = 0.0;
    for (Eigen::Index i = 0; i < grid.rows(); ++i) best = std::max(best, std::abs(f(grid.row(i).transpose())));
    return best;
  }
  if (q != 1.0 && q != 2.0) throw InvalidArgument("unsupported norm exponent (use 1, 2 or inf)");
  VectorXd v(rule.size());
  for (Eigen::Index i = 0; i < rule.size(); ++i) v(i) = f(rule.nodes.row(i).transpose());
  return lq_norm_values(rule, v, q);
}

double discrete_norm(const VectorXd& values, double rho) {
  if (values.size() == 0) throw InvalidArgument("discrete norm of an empty vector");
  if (rho == 1.0) return values.lpNorm<1>();
  if (rho == 2.0) return values.norm();
  if (std::isinf(rho) && rho > 0) return values.lpNorm<Eigen::Infinity>();
  throw InvalidArgument("unsupported discrete norm exponent (use 1, 2 or inf)");
}

}  // namespace kerninv
