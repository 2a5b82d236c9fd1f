#pragma once

// Brute-force reference computations for tests. Nothing here reuses the assembly or
// factorization code of the main modules; only kernel evaluation and quadrature rules.

#include "kerninv/kernels.hpp"
#include "kerninv/quadrature.hpp"

#include <cstdint>

namespace kerninv::oracle {

/// Largest (c^T A c)/(c^T B c) over `trials` seeded standard-normal draws of c.
double mc_rayleigh_bound(const MatrixXd& a, const MatrixXd& b, int trials, std::uint64_t seed);

/// Largest generalized eigenvalue via a hand-written Cholesky of B and cyclic Jacobi on
/// L^{-1} A L^{-T}. n <= 32.
double dense_eig_reference(const MatrixXd& a, const MatrixXd& b);

/// max over draws and grid points of |u(y)| / ||u||_{L2}, u with seeded normal coefficients,
/// followed by a coordinate hill-climb from the best draw. A lower bound on the Nikolskii value.
double brute_sup_norm_ratio(const TrialSpace& space, const QuadratureRule& rule, int draws, const PointsXd& grid,
                            std::uint64_t seed);

struct ScanResult {
  double h = 0.0;  ///< max over a dense lattice of the distance to the nearest node
  double q = 0.0;  ///< half the minimal pairwise distance
};

/// Literal O(N^2) and O(N * grid) transcriptions of fill distance and separation radius.
/// The lattice has spacing about 1/sqrt(resolution) of the host's extent per axis.
ScanResult pairwise_scan(const PointsXd& points, const Host& host, int resolution = 20000);

}  // namespace kerninv::oracle
