#include "kerninv/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace kerninv::oracle {

namespace {

double quad_form(const MatrixXd& m, const VectorXd& c) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) s += c(i) * m(i, j) * c(j);
  return s;
}

double kernel_value(const TrialSpace& space, const Eigen::Ref<const Eigen::VectorXd>& y,
                    const Eigen::Ref<const Eigen::VectorXd>& x) {
  double r2 = 0.0;
  for (Eigen::Index k = 0; k < y.size(); ++k) r2 += (y(k) - x(k)) * (y(k) - x(k));
  return space.kernel().profile(std::sqrt(r2));
}

// Basis values at quadrature and grid points, so each draw costs two mat-vecs.
struct Tables {
  MatrixXd at_rule;
  MatrixXd at_grid;
};

Tables tabulate(const TrialSpace& space, const QuadratureRule& rule, const PointsXd& grid) {
  const PointsXd& nodes = space.nodes().points;
  Tables t{MatrixXd(rule.nodes.rows(), nodes.rows()), MatrixXd(grid.rows(), nodes.rows())};
  for (Eigen::Index j = 0; j < nodes.rows(); ++j) {
    for (Eigen::Index i = 0; i < rule.nodes.rows(); ++i)
      t.at_rule(i, j) = kernel_value(space, rule.nodes.row(i), nodes.row(j));
    for (Eigen::Index i = 0; i < grid.rows(); ++i) t.at_grid(i, j) = kernel_value(space, grid.row(i), nodes.row(j));
  }
  return t;
}

double sup_ratio(const Tables& t, const VectorXd& w, const VectorXd& c) {
  const VectorXd ur = t.at_rule * c;
  double l2 = 0.0;
  for (Eigen::Index i = 0; i < ur.size(); ++i) l2 += w(i) * ur(i) * ur(i);
  if (!(l2 > 0.0)) return 0.0;
  return (t.at_grid * c).cwiseAbs().maxCoeff() / std::sqrt(l2);
}

double distance(const Host& host, const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b) {
  double chord2 = 0.0;
  for (Eigen::Index k = 0; k < a.size(); ++k) chord2 += (a(k) - b(k)) * (a(k) - b(k));
  const double chord = std::sqrt(chord2);
  if (std::holds_alternative<Manifold>(host)) {
    const double rad = std::get<Manifold>(host).radius;
    return 2.0 * rad * std::asin(std::min(1.0, chord / (2.0 * rad)));
  }
  return chord;
}

PointsXd lattice(const Host& host, int resolution) {
  if (const auto* m = std::get_if<Manifold>(&host)) {
    PointsXd g(resolution, 2);
    for (int i = 0; i < resolution; ++i) {
      const double a = 2.0 * std::numbers::pi * i / resolution;
      g.row(i) << m->radius * std::cos(a), m->radius * std::sin(a);
    }
    return g;
  }
  const Domain& dom = std::get<Domain>(host);
  if (const auto* iv = std::get_if<Interval>(&dom.shape)) {
    PointsXd g(resolution, 1);
    for (int i = 0; i < resolution; ++i) g(i, 0) = iv->a + (iv->b - iv->a) * i / (resolution - 1.0);
    return g;
  }
  Eigen::Vector2d lo, hi;
  if (const auto* b = std::get_if<Box>(&dom.shape)) {
    lo = b->lo;
    hi = b->hi;
  } else if (const auto* d = std::get_if<Disk>(&dom.shape)) {
    lo = d->center.array() - d->radius;
    hi = d->center.array() + d->radius;
  } else {
    const double r = std::get<Annulus>(dom.shape).outer;
    lo << -r, -r;
    hi << r, r;
  }
  const int per = std::max(2, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(resolution)))));
  std::vector<Eigen::Vector2d> kept;
  for (int i = 0; i < per; ++i)
    for (int j = 0; j < per; ++j) {
      const Eigen::Vector2d x(lo(0) + (hi(0) - lo(0)) * i / (per - 1.0), lo(1) + (hi(1) - lo(1)) * j / (per - 1.0));
      if (dom.contains(x)) kept.push_back(x);
    }
  PointsXd g(static_cast<Eigen::Index>(kept.size()), 2);
  for (std::size_t i = 0; i < kept.size(); ++i) g.row(static_cast<Eigen::Index>(i)) = kept[i].transpose();
  return g;
}

}  // namespace

double mc_rayleigh_bound(const MatrixXd& a, const MatrixXd& b, int trials, std::uint64_t seed) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
    throw InvalidArgument("pencil matrices must be square and of equal size");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  double best = -std::numeric_limits<double>::infinity();
  VectorXd c(a.rows());
  for (int t = 0; t < trials; ++t) {
    for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = normal(rng);
    const double den = quad_form(b, c);
    if (den > 0.0) best = std::max(best, quad_form(a, c) / den);
  }
  return best;
}

double dense_eig_reference(const MatrixXd& a, const MatrixXd& b) {
  const Eigen::Index n = a.rows();
  if (n > 32) throw InvalidArgument("dense reference is limited to n <= 32");
  if (n == 0 || a.cols() != n || b.rows() != n || b.cols() != n)
    throw InvalidArgument("pencil matrices must be square, nonempty and of equal size");

  // Cholesky-Banachiewicz, lower triangular.
  std::vector<std::vector<double>> l(n, std::vector<double>(n, 0.0));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) {
      double s = b(i, j);
      for (Eigen::Index k = 0; k < j; ++k) s -= l[i][k] * l[j][k];
      if (i == j) {
        if (!(s > 0.0)) throw NumericalError("denominator matrix is not positive definite");
        l[i][i] = std::sqrt(s);
      } else {
        l[i][j] = s / l[j][j];
      }
    }

  // C = L^{-1} A L^{-T}: forward-substitute columns of A, then rows.
  std::vector<std::vector<double>> y(n, std::vector<double>(n, 0.0));
  for (Eigen::Index col = 0; col < n; ++col)
    for (Eigen::Index i = 0; i < n; ++i) {
      double s = a(i, col);
      for (Eigen::Index k = 0; k < i; ++k) s -= l[i][k] * y[k][col];
      y[i][col] = s / l[i][i];
    }
  std::vector<std::vector<double>> c(n, std::vector<double>(n, 0.0));
  for (Eigen::Index row = 0; row < n; ++row)
    for (Eigen::Index j = 0; j < n; ++j) {
      double s = y[row][j];
      for (Eigen::Index k = 0; k < j; ++k) s -= l[j][k] * c[row][k];
      c[row][j] = s / l[j][j];
    }
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < i; ++j) c[i][j] = c[j][i] = 0.5 * (c[i][j] + c[j][i]);

  // Cyclic Jacobi sweeps until the off-diagonal mass is negligible.
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0, diag = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      diag += c[i][i] * c[i][i];
      for (Eigen::Index j = i + 1; j < n; ++j) off += c[i][j] * c[i][j];
    }
    if (off <= 1e-30 * std::max(diag, 1e-300)) break;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (c[p][q] == 0.0) continue;
        const double theta = (c[q][q] - c[p][p]) / (2.0 * c[p][q]);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double cs = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * cs;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double ckp = c[k][p], ckq = c[k][q];
          c[k][p] = cs * ckp - sn * ckq;
          c[k][q] = sn * ckp + cs * ckq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double cpk = c[p][k], cqk = c[q][k];
          c[p][k] = cs * cpk - sn * cqk;
          c[q][k] = sn * cpk + cs * cqk;
        }
      }
  }
  double best = c[0][0];
  for (Eigen::Index i = 1; i < n; ++i) best = std::max(best, c[i][i]);
  return best;
}

double brute_sup_norm_ratio(const TrialSpace& space, const QuadratureRule& rule, int draws, const PointsXd& grid,
                            std::uint64_t seed) {
  const Tables t = tabulate(space, rule, grid);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const Eigen::Index n = space.size();
  VectorXd c(n), best_c = VectorXd::Zero(n);
  double best = 0.0;
  for (int d = 0; d < draws; ++d) {
    for (Eigen::Index i = 0; i < n; ++i) c(i) = normal(rng);
    const double v = sup_ratio(t, rule.weights, c);
    if (v > best) {
      best = v;
      best_c = c;
    }
  }
  if (best == 0.0) return best;
  // Per grid point, coordinate ascent on (k_y . c)^2 / (c^T M c) from the best draw, with
  // M summed by hand from the tabulated rule values. Each coordinate step is the exact
  // line maximizer t = (a B - b A) / (b B - a C).
  MatrixXd mass = MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) {
      double s = 0.0;
      for (Eigen::Index k = 0; k < t.at_rule.rows(); ++k) s += rule.weights(k) * t.at_rule(k, i) * t.at_rule(k, j);
      mass(i, j) = mass(j, i) = s;
    }
  for (Eigen::Index y = 0; y < t.at_grid.rows(); ++y) {
    const VectorXd ky = t.at_grid.row(y).transpose();
    c = best_c;
    VectorXd mc = mass * c;
    for (int sweep = 0; sweep < 5000; ++sweep)
      for (Eigen::Index i = 0; i < n; ++i) {
        const double av = ky.dot(c), bv = ky(i), aa = c.dot(mc), bb = mc(i), cc = mass(i, i);
        const double den = bv * bb - av * cc;
        if (den == 0.0) continue;
        const double step = (av * bb - bv * aa) / den;
        const double before = av * av / aa;
        const double after_num = (av + step * bv) * (av + step * bv);
        const double after_den = aa + 2.0 * step * bb + step * step * cc;
        if (!(after_den > 0.0) || after_num / after_den <= before) continue;
        c(i) += step;
        mc += step * mass.col(i);
      }
    best = std::max(best, sup_ratio(t, rule.weights, c));
  }
  return best;
}

ScanResult pairwise_scan(const PointsXd& points, const Host& host, int resolution) {
  ScanResult r;
  const Eigen::Index n = points.rows();
  double min_pair = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) min_pair = std::min(min_pair, distance(host, points.row(i), points.row(j)));
  r.q = 0.5 * min_pair;
  const PointsXd g = lattice(host, resolution);
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    double nearest = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < n; ++j) nearest = std::min(nearest, distance(host, g.row(i), points.row(j)));
    r.h = std::max(r.h, nearest);
  }
  return r;
}

}  // namespace kerninv::oracle
