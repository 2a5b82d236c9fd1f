#include "kerninv/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

namespace kerninv {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Nominal cone parameters; exact cone computation for general shapes is not attempted.
constexpr double kNominalConeAngle = kPi / 4.0;

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

template <typename... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <typename... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double wrapped_angle_gap(double a, double b) {
  double d = std::fmod(std::abs(a - b), kTwoPi);
  return std::min(d, kTwoPi - d);
}

}  // namespace

int Domain::dim() const {
  return std::holds_alternative<Interval>(shape) ? 1 : 2;
}

double Domain::volume() const {
  return std::visit(Overloaded{
                        [](const Interval& s) { return s.b - s.a; },
                        [](const Box& s) { return (s.hi - s.lo).prod(); },
                        [](const Disk& s) { return kPi * s.radius * s.radius; },
                        [](const Annulus& s) {
                          return kPi * (s.outer * s.outer - s.inner * s.inner);
                        },
                    },
                    shape);
}

bool Domain::contains(const Eigen::Ref<const Eigen::VectorXd>& x, double slack) const {
  return std::visit(Overloaded{
                        [&](const Interval& s) { return x(0) >= s.a - slack && x(0) <= s.b + slack; },
                        [&](const Box& s) {
                          return (x.array() >= s.lo.array() - slack).all() &&
                                 (x.array() <= s.hi.array() + slack).all();
                        },
                        [&](const Disk& s) { return (x - s.center).norm() <= s.radius + slack; },
                        [&](const Annulus& s) {
                          const double r = x.norm();
                          return r >= s.inner - slack && r <= s.outer + slack;
                        },
                    },
                    shape);
}

Domain make_interval(double a, double b) {
  if (!(b > a)) throw InvalidArgument("interval needs a < b");
  return Domain{Interval{a, b}, kNominalConeAngle, 0.5 * (b - a)};
}

Domain make_box(const Eigen::Vector2d& lo, const Eigen::Vector2d& hi) {
  if (!((hi - lo).array() > 0.0).all()) throw InvalidArgument("box needs lo < hi on every axis");
  return Domain{Box{lo, hi}, kNominalConeAngle, 0.5 * (hi - lo).minCoeff()};
}

Domain make_disk(const Eigen::Vector2d& center, double radius) {
  if (!(radius > 0.0)) throw InvalidArgument("disk needs a positive radius");
  return Domain{Disk{center, radius}, kNominalConeAngle, radius};
}

Domain make_annulus(double inner, double outer) {
  if (!(inner > 0.0 && outer > inner)) throw InvalidArgument("annulus needs 0 < inner < outer");
  return Domain{Annulus{inner, outer}, kNominalConeAngle, 0.5 * (outer - inner)};
}

int ambient_dim(const Host& host) {
  return std::visit(Overloaded{[](const Domain& d) { return d.dim(); },
                               [](const Manifold&) { return Manifold::ambient_dim; }},
                    host);
}

bool is_manifold(const Host& host) { return std::holds_alternative<Manifold>(host); }

std::string describe(const Host& host) {
  std::ostringstream os;
  os.precision(17);
  std::visit(Overloaded{
                 [&](const Domain& d) {
                   std::visit(Overloaded{
                                  [&](const Interval& s) { os << "interval(" << s.a << "," << s.b << ")"; },
                                  [&](const Box& s) {
                                    os << "box(" << s.lo(0) << "," << s.lo(1) << ";" << s.hi(0) << ","
                                       << s.hi(1) << ")";
                                  },
                                  [&](const Disk& s) {
                                    os << "disk(" << s.center(0) << "," << s.center(1) << ";" << s.radius
                                       << ")";
                                  },
                                  [&](const Annulus& s) { os << "annulus(" << s.inner << "," << s.outer << ")"; },
                              },
                              d.shape);
                 },
                 [&](const Manifold&) { os << "circle"; },
             },
             host);
  return os.str();
}

double polar_angle(const Eigen::Ref<const Eigen::VectorXd>& x) {
  double a = std::atan2(x(1), x(0));
  if (a < 0.0) a += kTwoPi;
  return a;
}

double host_distance(const Host& host, const Eigen::Ref<const Eigen::VectorXd>& a,
                     const Eigen::Ref<const Eigen::VectorXd>& b) {
  if (is_manifold(host)) {
    // Arc length on the unit circle; atan2 of cross/dot stays accurate near 0 and pi.
    const double cross = a(0) * b(1) - a(1) * b(0);
    const double dot = a.dot(b);
    return std::abs(std::atan2(cross, dot));
  }
  return (a - b).norm();
}

PointsXd candidate_grid(const Host& host, std::size_t resolution) {
  resolution = std::max<std::size_t>(resolution, 2);
  if (const auto* m = std::get_if<Manifold>(&host)) {
    const std::size_t n = next_pow2(resolution);
    PointsXd g(static_cast<Eigen::Index>(n), 2);
    for (std::size_t i = 0; i < n; ++i) {
      const double t = kTwoPi * static_cast<double>(i) / static_cast<double>(n);
      g.row(static_cast<Eigen::Index>(i)) << m->radius * std::cos(t), m->radius * std::sin(t);
    }
    return g;
  }
  const auto& dom = std::get<Domain>(host);
  return std::visit(
      Overloaded{
          [&](const Interval& s) {
            const std::size_t n = next_pow2(resolution);
            PointsXd g(static_cast<Eigen::Index>(n + 1), 1);
            for (std::size_t i = 0; i <= n; ++i)
              g(static_cast<Eigen::Index>(i), 0) =
                  s.a + (s.b - s.a) * static_cast<double>(i) / static_cast<double>(n);
            return g;
          },
          [&](const Box& s) {
            const auto n = static_cast<Eigen::Index>(
                next_pow2(static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(resolution))))));
            PointsXd g((n + 1) * (n + 1), 2);
            for (Eigen::Index i = 0; i <= n; ++i)
              for (Eigen::Index j = 0; j <= n; ++j)
                g.row(i * (n + 1) + j) << s.lo(0) + (s.hi(0) - s.lo(0)) * double(i) / double(n),
                    s.lo(1) + (s.hi(1) - s.lo(1)) * double(j) / double(n);
            return g;
          },
          [&](const Disk& s) {
            // The inscribed fraction pi/4 of a (n+1)^2 grid with n^2 >= 2*resolution suffices.
            const auto n = static_cast<Eigen::Index>(next_pow2(
                static_cast<std::size_t>(std::ceil(std::sqrt(2.0 * static_cast<double>(resolution))))));
            std::vector<Eigen::Vector2d> pts;
            for (Eigen::Index i = 0; i <= n; ++i)
              for (Eigen::Index j = 0; j <= n; ++j) {
                Eigen::Vector2d p(-1.0 + 2.0 * double(i) / double(n), -1.0 + 2.0 * double(j) / double(n));
                if (p.norm() <= 1.0) pts.push_back(s.center + s.radius * p);
              }
            const Eigen::Index nb = 4 * n;
            for (Eigen::Index k = 0; k < nb; ++k) {
              const double t = kTwoPi * double(k) / double(nb);
              pts.push_back(s.center + s.radius * Eigen::Vector2d(std::cos(t), std::sin(t)));
            }
            PointsXd g(static_cast<Eigen::Index>(pts.size()), 2);
            for (std::size_t k = 0; k < pts.size(); ++k) g.row(static_cast<Eigen::Index>(k)) = pts[k].transpose();
            return g;
          },
          [&](const Annulus& s) {
            // Angular spacing roughly matched to radial spacing at the outer radius.
            const double width = s.outer - s.inner;
            const double aspect = kTwoPi * s.outer / width;
            auto nr = static_cast<Eigen::Index>(
                next_pow2(static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(resolution) / aspect)))));
            nr = std::max<Eigen::Index>(nr, 2);
            const auto nt = static_cast<Eigen::Index>(
                next_pow2(static_cast<std::size_t>(std::ceil(static_cast<double>(resolution) / double(nr + 1)))));
            PointsXd g((nr + 1) * nt, 2);
            for (Eigen::Index i = 0; i <= nr; ++i) {
              const double r = s.inner + width * double(i) / double(nr);
              for (Eigen::Index j = 0; j < nt; ++j) {
                const double t = kTwoPi * double(j) / double(nt);
                g.row(i * nt + j) << r * std::cos(t), r * std::sin(t);
              }
            }
            return g;
          },
      },
      dom.shape);
}

double fill_distance(const PointsXd& points, const Host& host, std::size_t resolution) {
  if (points.rows() == 0) throw InvalidArgument("empty node set");
  const PointsXd grid = candidate_grid(host, resolution);
  double h = 0.0;
  if (is_manifold(host)) {
    std::vector<double> node_angles(static_cast<std::size_t>(points.rows()));
    for (Eigen::Index j = 0; j < points.rows(); ++j)
      node_angles[static_cast<std::size_t>(j)] = polar_angle(points.row(j).transpose());
    for (Eigen::Index i = 0; i < grid.rows(); ++i) {
      const double t = polar_angle(grid.row(i).transpose());
      double best = std::numeric_limits<double>::infinity();
      for (double a : node_angles) best = std::min(best, wrapped_angle_gap(t, a));
      h = std::max(h, best);
    }
    return h;
  }
  for (Eigen::Index i = 0; i < grid.rows(); ++i) {
    const double best = (points.rowwise() - grid.row(i)).rowwise().squaredNorm().minCoeff();
    h = std::max(h, best);
  }
  return std::sqrt(h);
}

double fill_distance(const PointSet& x, std::size_t resolution) {
  return fill_distance(x.points, x.host, resolution);
}

double separation_radius(const PointsXd& points, const Host& host) {
  if (points.rows() < 2) throw InvalidArgument("separation radius needs at least two nodes");
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < points.rows(); ++i)
    for (Eigen::Index j = i + 1; j < points.rows(); ++j)
      best = std::min(best, host_distance(host, points.row(i).transpose(), points.row(j).transpose()));
  return 0.5 * best;
}

double separation_radius(const PointSet& x) { return separation_radius(x.points, x.host); }

double mesh_ratio(const PointSet& x, std::size_t resolution) {
  return fill_distance(x, resolution) / separation_radius(x);
}

PointSet make_point_set(PointsXd points, const Host& host, std::size_t fill_resolution) {
  if (points.rows() == 0) throw InvalidArgument("empty node set");
  if (points.cols() != ambient_dim(host))
    throw InvalidArgument("node dimension does not match host dimension");
  if (points.rows() > kMaxNodes) throw InvalidArgument("node count exceeds memory budget (1e5)");
  if (const auto* m = std::get_if<Manifold>(&host)) {
    for (Eigen::Index i = 0; i < points.rows(); ++i)
      if (std::abs(points.row(i).norm() - m->radius) > 1e-12)
        throw InvalidArgument("node off the manifold by more than 1e-12");
  }
  PointSet x{std::move(points), host};
  if (x.size() >= 2) {
    x.q = separation_radius(x);
    if (!(x.q > 0.0)) throw InvalidArgument("coalescing nodes");
  }
  x.h = fill_distance(x, fill_resolution);
  x.rho = std::isinf(x.q) ? 0.0 : x.h / x.q;
  return x;
}

PointSet uniform_refinement(const Host& host, int level, std::size_t fill_resolution) {
  if (level < 0) throw InvalidArgument("refinement level must be >= 0");
  if (level > 30) throw InvalidArgument("node count exceeds memory budget (1e5)");
  const auto n = Eigen::Index{1} << level;
  auto check_budget = [](Eigen::Index count) {
    if (count > kMaxNodes) throw InvalidArgument("node count exceeds memory budget (1e5)");
  };
  if (const auto* m = std::get_if<Manifold>(&host)) {
    check_budget(n);
    PointsXd p(n, 2);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double t = kTwoPi * double(i) / double(n);
      p.row(i) << m->radius * std::cos(t), m->radius * std::sin(t);
    }
    return make_point_set(std::move(p), host, fill_resolution);
  }
  const auto& dom = std::get<Domain>(host);
  PointsXd p = std::visit(
      Overloaded{
          [&](const Interval& s) {
            check_budget(n + 1);
            PointsXd g(n + 1, 1);
            for (Eigen::Index i = 0; i <= n; ++i) g(i, 0) = s.a + (s.b - s.a) * double(i) / double(n);
            return g;
          },
          [&](const Box& s) {
            check_budget((n + 1) * (n + 1));
            PointsXd g((n + 1) * (n + 1), 2);
            for (Eigen::Index i = 0; i <= n; ++i)
              for (Eigen::Index j = 0; j <= n; ++j)
                g.row(i * (n + 1) + j) << s.lo(0) + (s.hi(0) - s.lo(0)) * double(i) / double(n),
                    s.lo(1) + (s.hi(1) - s.lo(1)) * double(j) / double(n);
            return g;
          },
          [&](const Disk& s) {
            // Ring i sits at radius i*step with round(2 pi i) nodes; odd rings are rotated by
            // half their angular step.
            const double step = s.radius / double(n);
            std::vector<Eigen::Vector2d> pts{s.center};
            for (Eigen::Index i = 1; i <= n; ++i) {
              const auto count = static_cast<Eigen::Index>(std::lround(kTwoPi * double(i)));
              check_budget(static_cast<Eigen::Index>(pts.size()) + count);
              const double offset = (i % 2 == 1) ? kPi / double(count) : 0.0;
              for (Eigen::Index j = 0; j < count; ++j) {
                const double t = offset + kTwoPi * double(j) / double(count);
                pts.push_back(s.center + double(i) * step * Eigen::Vector2d(std::cos(t), std::sin(t)));
              }
            }
            PointsXd g(static_cast<Eigen::Index>(pts.size()), 2);
            for (std::size_t k = 0; k < pts.size(); ++k) g.row(static_cast<Eigen::Index>(k)) = pts[k].transpose();
            return g;
          },
          [&](const Annulus& s) {
            const double step = (s.outer - s.inner) / double(n);
            std::vector<Eigen::Vector2d> pts;
            for (Eigen::Index i = 0; i <= n; ++i) {
              const double r = s.inner + double(i) * step;
              const auto count = std::max<Eigen::Index>(3, std::lround(kTwoPi * r / step));
              check_budget(static_cast<Eigen::Index>(pts.size()) + count);
              const double offset = (i % 2 == 1) ? kPi / double(count) : 0.0;
              for (Eigen::Index j = 0; j < count; ++j) {
                const double t = offset + kTwoPi * double(j) / double(count);
                pts.emplace_back(r * std::cos(t), r * std::sin(t));
              }
            }
            PointsXd g(static_cast<Eigen::Index>(pts.size()), 2);
            for (std::size_t k = 0; k < pts.size(); ++k) g.row(static_cast<Eigen::Index>(k)) = pts[k].transpose();
            return g;
          },
      },
      dom.shape);
  return make_point_set(std::move(p), host, fill_resolution);
}

namespace {

PointsXd random_points(const Host& host, Eigen::Index count, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  PointsXd p(count, ambient_dim(host));
  if (const auto* m = std::get_if<Manifold>(&host)) {
    for (Eigen::Index i = 0; i < count; ++i) {
      const double t = kTwoPi * u(rng);
      p.row(i) << m->radius * std::cos(t), m->radius * std::sin(t);
    }
    return p;
  }
  const auto& dom = std::get<Domain>(host);
  for (Eigen::Index i = 0; i < count; ++i) {
    std::visit(Overloaded{
                   [&](const Interval& s) { p(i, 0) = s.a + (s.b - s.a) * u(rng); },
                   [&](const Box& s) {
                     const double x = u(rng);
                     const double y = u(rng);
                     p.row(i) << s.lo(0) + (s.hi(0) - s.lo(0)) * x, s.lo(1) + (s.hi(1) - s.lo(1)) * y;
                   },
                   [&](const Disk& s) {
                     const double r = s.radius * std::sqrt(u(rng));
                     const double t = kTwoPi * u(rng);
                     p.row(i) << s.center(0) + r * std::cos(t), s.center(1) + r * std::sin(t);
                   },
                   [&](const Annulus& s) {
                     const double r2 = s.inner * s.inner + (s.outer * s.outer - s.inner * s.inner) * u(rng);
                     const double r = std::sqrt(r2);
                     const double t = kTwoPi * u(rng);
                     p.row(i) << r * std::cos(t), r * std::sin(t);
                   },
               },
               dom.shape);
  }
  return p;
}

}  // namespace

PointSet farthest_point_sample(const Host& host, Eigen::Index n, Eigen::Index candidates,
                               std::uint64_t seed, std::size_t fill_resolution) {
  if (n < 1) throw InvalidArgument("farthest point sampling needs n >= 1");
  if (n > candidates) throw InvalidArgument("more samples requested than candidates");
  if (candidates < 10 * n) throw InvalidArgument("candidate pool must hold at least 10*n points");
  std::mt19937_64 rng(seed);
  const PointsXd pool = random_points(host, candidates, rng);

  auto dist = [&](Eigen::Index i, Eigen::Index j) {
    return host_distance(host, pool.row(i).transpose(), pool.row(j).transpose());
  };
  // Seed with the candidate farthest from an arbitrary one, so extremes are picked first.
  Eigen::Index start = 0;
  double far = -1.0;
  for (Eigen::Index i = 0; i < candidates; ++i) {
    const double d = dist(0, i);
    if (d > far) {
      far = d;
      start = i;
    }
  }
  std::vector<Eigen::Index> chosen{start};
  Eigen::VectorXd nearest(candidates);
  for (Eigen::Index i = 0; i < candidates; ++i) nearest(i) = dist(start, i);
  while (static_cast<Eigen::Index>(chosen.size()) < n) {
    Eigen::Index next = 0;
    nearest.maxCoeff(&next);
    chosen.push_back(next);
    for (Eigen::Index i = 0; i < candidates; ++i) nearest(i) = std::min(nearest(i), dist(next, i));
  }
  PointsXd p(n, pool.cols());
  for (Eigen::Index k = 0; k < n; ++k) p.row(k) = pool.row(chosen[static_cast<std::size_t>(k)]);
  return make_point_set(std::move(p), host, fill_resolution);
}

Eigen::Vector2d closest_point(const Eigen::Ref<const Eigen::VectorXd>& x, const Manifold& m) {
  const double r = x.head<2>().norm();
  if (r < 1e-300) throw InvalidArgument("focal point");
  return m.radius * x.head<2>() / r;
}

Domain tubular_domain(const Manifold& m, double delta) {
  if (!(delta > 0.0)) throw InvalidArgument("band half-width must be positive");
  if (delta >= m.radius) throw InvalidArgument("focal point inside band");
  return make_annulus(m.radius - delta, m.radius + delta);
}

DomainConstants domain_constants(const Domain& dom) {
  const double d = dom.dim();
  const double lower =
      std::pow(kPi, -0.5) * std::pow(dom.volume() * std::tgamma(d / 2.0 + 1.0), 1.0 / d);
  return {lower, std::pow(kTwoPi / dom.cone_angle, 1.0 / d) * lower};
}

void write_points_csv(std::ostream& os, const PointsXd& points) {
  for (Eigen::Index c = 0; c < points.cols(); ++c) os << (c ? ",x" : "x") << c;
  os << '\n';
  const auto old = os.precision(17);
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    for (Eigen::Index c = 0; c < points.cols(); ++c) os << (c ? "," : "") << points(i, c);
    os << '\n';
  }
  os.precision(old);
}

PointsXd read_points_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw InvalidArgument("point CSV is empty");
  const auto cols = static_cast<Eigen::Index>(std::count(line.begin(), line.end(), ',') + 1);
  std::vector<double> values;
  Eigen::Index rows = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    Eigen::Index c = 0;
    while (std::getline(ls, cell, ',')) {
      values.push_back(std::stod(cell));
      ++c;
    }
    if (c != cols) throw InvalidArgument("point CSV row has wrong column count");
    ++rows;
  }
  PointsXd p(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index c = 0; c < cols; ++c) p(i, c) = values[static_cast<std::size_t>(i * cols + c)];
  return p;
}

}  // namespace kerninv
