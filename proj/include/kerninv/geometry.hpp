#pragma once

#include "kerninv/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <variant>

namespace kerninv {

struct Interval {
  double a = 0.0;
  double b = 1.0;
  bool operator==(const Interval&) const = default;
};

struct Box {
  Eigen::Vector2d lo{0.0, 0.0};
  Eigen::Vector2d hi{1.0, 1.0};
  bool operator==(const Box& o) const { return lo == o.lo && hi == o.hi; }
};

struct Disk {
  Eigen::Vector2d center{0.0, 0.0};
  double radius = 1.0;
  bool operator==(const Disk& o) const { return center == o.center && radius == o.radius; }
};

/// Annulus centred at the origin; the tubular neighbourhood of the unit circle.
struct Annulus {
  double inner = 0.9;
  double outer = 1.1;
  bool operator==(const Annulus&) const = default;
};

using Shape = std::variant<Interval, Box, Disk, Annulus>;

/// Bounded domain with its interior cone parameters.
struct Domain {
  Shape shape;
  double cone_angle = 0.0;
  double cone_radius = 0.0;

  int dim() const;
  double volume() const;
  bool contains(const Eigen::Ref<const Eigen::VectorXd>& x, double slack = 1e-12) const;
  bool operator==(const Domain&) const = default;
};

Domain make_interval(double a, double b);
Domain make_box(const Eigen::Vector2d& lo, const Eigen::Vector2d& hi);
Domain make_disk(const Eigen::Vector2d& center, double radius);
Domain make_annulus(double inner, double outer);

/// The unit circle S^1 embedded in R^2 (codimension one).
struct Manifold {
  double radius = 1.0;
  static constexpr int ambient_dim = 2;
  static constexpr int intrinsic_dim = 1;
  bool operator==(const Manifold&) const = default;
};

using Host = std::variant<Domain, Manifold>;

int ambient_dim(const Host& host);
bool is_manifold(const Host& host);
std::string describe(const Host& host);

/// Euclidean distance on domains, arc length on the circle.
double host_distance(const Host& host, const Eigen::Ref<const Eigen::VectorXd>& a,
                     const Eigen::Ref<const Eigen::VectorXd>& b);

/// Angle in [0, 2pi) of a point in the plane.
double polar_angle(const Eigen::Ref<const Eigen::VectorXd>& x);

/// Finite node set with cached fill distance h, separation radius q and ratio rho = h/q.
/// A single node has q = +inf and rho = 0.
struct PointSet {
  PointsXd points;
  Host host;
  double h = 0.0;
  double q = std::numeric_limits<double>::infinity();
  double rho = 0.0;

  Eigen::Index size() const { return points.rows(); }
  int dim() const { return static_cast<int>(points.cols()); }
};

inline constexpr std::size_t kDefaultFillResolution = 100000;

/// Validates (distinct points, on-manifold to 1e-12) and caches h, q, rho.
PointSet make_point_set(PointsXd points, const Host& host,
                        std::size_t fill_resolution = kDefaultFillResolution);

/// Dense candidate grid covering the host with at least `resolution` points.
PointsXd candidate_grid(const Host& host, std::size_t resolution);

/// Max over a dense candidate grid of the distance to the nearest node; a lower bound on h.
double fill_distance(const PointsXd& points, const Host& host,
                     std::size_t resolution = kDefaultFillResolution);
double fill_distance(const PointSet& x, std::size_t resolution = kDefaultFillResolution);

double separation_radius(const PointsXd& points, const Host& host);
double separation_radius(const PointSet& x);

double mesh_ratio(const PointSet& x, std::size_t resolution = kDefaultFillResolution);

inline constexpr Eigen::Index kMaxNodes = 100000;

/// Structured quasi-uniform nodes: 2^k+1 per axis on intervals/boxes, 2^k angles on the
/// circle, concentric rings on disks and annuli.
PointSet uniform_refinement(const Host& host, int level,
                            std::size_t fill_resolution = kDefaultFillResolution);

/// Greedy max-min selection from a seeded uniform candidate pool.
PointSet farthest_point_sample(const Host& host, Eigen::Index n, Eigen::Index candidates,
                               std::uint64_t seed,
                               std::size_t fill_resolution = kDefaultFillResolution);

/// x / |x| on the unit circle. Throws at the focal point (origin).
Eigen::Vector2d closest_point(const Eigen::Ref<const Eigen::VectorXd>& x, const Manifold& m);

/// Band {x : | |x| - 1 | < delta} around the circle.
Domain tubular_domain(const Manifold& m, double delta);

struct DomainConstants {
  double lower = 0.0;  ///< c_Omega
  double upper = 0.0;  ///< C_Omega
};

/// Volume constants of the l2-stability estimate:
/// c = pi^{-1/2} (vol * Gamma(d/2 + 1))^{1/d},  C = (2 pi / theta)^{1/d} c.
DomainConstants domain_constants(const Domain& dom);

void write_points_csv(std::ostream& os, const PointsXd& points);
PointsXd read_points_csv(std::istream& is);

}  // namespace kerninv
