#pragma once

#include "kerninv/kernels.hpp"
#include "kerninv/pencil.hpp"
#include "kerninv/quadrature.hpp"

#include <optional>
#include <vector>

namespace kerninv {

/// s = k + t with k = floor(s) and t in [0, 1).
struct FractionalSplit {
  int k = 0;
  double t = 0.0;
};

FractionalSplit split_order(double s);

enum class GramKind { FullNorm, Seminorm };

struct SobolevGram {
  double order = 0.0;
  GramKind kind = GramKind::FullNorm;
  MatrixXd matrix;
  int rule_level = 0;
  double dropped_measure = 0.0;  ///< Gagliardo pairs closer than the cutoff, in (volume)^2
};

/// Integer seminorm Grams G_0..G_kmax from one pass over the rule (rows streamed in
/// blocks), optionally with the QR square root of the full H^k Gram G_0 + ... + G_k for
/// k = root_order (no root when root_order < 0).
struct IntegerAssembly {
  std::vector<MatrixXd> seminorms;
  std::optional<SquareRoot> root;
};

IntegerAssembly assemble_integer_grams(const TrialSpace& space, int max_order, const QuadratureRule& rule,
                                       int root_order = -1);

/// (G_k)_jl = sum_{|alpha| = k} int D^alpha phi_j D^alpha phi_l.
SobolevGram integer_seminorm_gram(const TrialSpace& space, int k, const QuadratureRule& rule);

/// Fractional seminorm of order k + t of the basis translates: the double integral of
/// squared differences of order-k derivatives against |x - y|^{-(d + 2t)}, with x on
/// `rule`, y on its half-panel offset copy, and pairs closer than one panel width dropped.
SobolevGram gagliardo_seminorm_gram(const TrialSpace& space, int k, double t, const QuadratureRule& rule);

/// Full H^s Gram: sum of integer seminorms up to floor(s) plus the fractional term.
SobolevGram h_norm_gram(const TrialSpace& space, double s, const QuadratureRule& rule);

/// Node-count ceiling per grid for fractional orders in two dimensions.
inline constexpr Eigen::Index kMaxGagliardoNodes2d = 4000;

/// Gagliardo seminorm of an evaluable function (order 0 differences), same scheme.
struct GagliardoValue {
  double value = 0.0;
  double dropped_measure = 0.0;
};
GagliardoValue gagliardo_seminorm(const ScalarField& f, double t, const QuadratureRule& rule);

/// (sum_k (1 + k^2)^beta |u_k|^2)^{1/2} scaled by sqrt(2 pi), where u_k are the discrete
/// Fourier coefficients of 2^K equispaced samples; beta = 0 is the L2(S^1) norm.
double circle_spectral_norm(const VectorXd& samples, double beta);

/// Spectral H^beta Gram of restricted-kernel translates sampled at 2^K angles.
SobolevGram circle_sobolev_gram(const TrialSpace& space, double beta, int K);

/// QR square root of the circle L2 mass matrix (trapezoid rows at 2^K angles).
SquareRoot circle_l2_root(const TrialSpace& space, int K);

/// 2^K equispaced points on the unit circle.
PointsXd circle_samples(int K);

}  // namespace kerninv
