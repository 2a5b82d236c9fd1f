#pragma once

#include "kerninv/geometry.hpp"
#include "kerninv/types.hpp"

#include <functional>
#include <limits>

namespace kerninv {

/// Positive-weight rule on a host; weights sum to the host volume (2 pi on the circle).
struct QuadratureRule {
  PointsXd nodes;
  VectorXd weights;
  Host host;
  int level = 0;

  Eigen::Index size() const { return nodes.rows(); }
};

inline constexpr Eigen::Index kMaxRuleNodes = 10'000'000;
inline constexpr int kGaussPoints = 8;

/// n-point Gauss-Legendre nodes and weights on [-1, 1], ascending.
void gauss_legendre(int n, VectorXd& nodes, VectorXd& weights);

/// Composite rules: 2^k Gauss panels of 8 points per axis on intervals and boxes;
/// 2^k radial panels x 2^{k+6} angles on disks; an even number of radial panels (two for
/// thin bands) x 2^{k+4} angles on annuli; 2^{k+4} trapezoid points on the circle.
QuadratureRule build_rule(const Host& host, int level);

/// The interval/box rule shifted by half a panel (half-width end panels) and the disk,
/// annulus and circle rules rotated by half an angular step. Used as the second grid of
/// double integrals so no node pair coincides.
QuadratureRule offset_rule(const QuadratureRule& rule);

/// Panel width of the rule (radial panel width on disks and annuli, angle step on the circle).
double panel_width(const QuadratureRule& rule);

using ScalarField = std::function<double(const Eigen::Ref<const Eigen::VectorXd>&)>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Dense evaluation grid for sup norms, with at least `min_points` points on the host.
PointsXd sup_grid(const Host& host, Eigen::Index min_points);

/// (sum_i w_i |f(x_i)|^q)^{1/q} for q in {1, 2}; for q = inf the max over a grid with at
/// least 4x the rule's node count (a lower bound of the true sup).
double lq_norm(const QuadratureRule& rule, const ScalarField& f, double q);

/// Same with the values already sampled at the rule nodes (finite q only).
double lq_norm_values(const QuadratureRule& rule, const VectorXd& values, double q);

/// Raw l_rho norm of a vector, without 1/N normalization.
double discrete_norm(const VectorXd& values, double rho);

/// Sum reduced pairwise so results do not depend on chunking or thread count.
double pairwise_sum(const double* data, Eigen::Index n);

}  // namespace kerninv
