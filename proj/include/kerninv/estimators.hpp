#pragma once

#include "kerninv/kernels.hpp"
#include "kerninv/pencil.hpp"
#include "kerninv/quadrature.hpp"
#include "kerninv/sobolev.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace kerninv {

/// Extremal ratio over a trial space, with the space summary and conditioning diagnostics.
struct ConstantEstimate {
  double value = 0.0;
  double s_upper = 0.0;
  double s_lower = 0.0;
  Eigen::Index n = 0;
  double h = 0.0;
  double q = 0.0;
  double rho = 0.0;
  double m = 0.0;
  double jitter = 0.0;
  int jitter_escalations = 0;
  bool cholesky_fallback = false;
  double diag_ratio = 0.0;  ///< min/max |R_ii| of the denominator square root
  VectorXd extremizer;
};

/// sup_u ||u||_{H^s_upper} / ||u||_{H^s_lower} over the space (full norms), as the square
/// root of the top eigenvalue of the Gram pencil.
ConstantEstimate ratio_constant(const TrialSpace& space, double s_upper, double s_lower,
                                const QuadratureRule& rule);

/// True when s lies in (d/2, m] or [0, floor(m)].
bool bernstein_admissible(double s, double m, int dim);

/// sup ||u||_{H^s} / ||u||_{L2}; the fitted slope against q targets -s.
ConstantEstimate bernstein_constant(const TrialSpace& space, double s, const QuadratureRule& rule);

/// max_y sqrt(k_y^T M^{-1} k_y) over the evaluation grid: the sup of |u(y)| / ||u||_{L2}.
ConstantEstimate nikolskii_constant(const TrialSpace& space, const QuadratureRule& rule,
                                    const PointsXd& eval_grid);

/// sup |u|_{H^s} / ||u||_{l2(X)}; the slope against h targets d/2 - s.
ConstantEstimate stability_constant(const TrialSpace& space, double s, const QuadratureRule& rule);

/// Divides a stability value by (1 + rho^{m - d/2}) h^{d/2 - s}.
double stability_normalized(const ConstantEstimate& e, int dim);

/// sup ||u||_{H^m} / ||u||_{l2(X)}; the slope against q targets d/2 - m.
ConstantEstimate native_inverse_constant(const TrialSpace& space, const QuadratureRule& rule);

/// Norms of a single trial function by direct quadrature of its derivatives.
/// q in {1, 2, inf}; fractional orders are supported for q = 2 only.
double trial_seminorm(const TrialSpace& space, const VectorXd& coeffs, double s, double q,
                      const QuadratureRule& rule);
double trial_full_norm(const TrialSpace& space, const VectorXd& coeffs, double s, double p,
                       const QuadratureRule& rule);

/// The integer l bounding admissible s in the sampling inequality, from the case table on
/// l0 = m - d (1/p - 1/q)_+.
struct SamplingOrder {
  double l0 = 0.0;
  double l = 0.0;
  double gamma = 0.0;
};
SamplingOrder sampling_order(double m, int dim, double p, double q, double rho);

struct SamplingResult {
  double residual = 0.0;  ///< LHS / (first + second term)
  double lhs = 0.0;
  double smooth_term = 0.0;
  double discrete_term = 0.0;
  SamplingOrder order;
  /// p = q = rho = 2 form: |u|_{H^s} / (h^{m-s} ||u||_{H^m} + h^{d/2-s} ||u||_{l2(X)}).
  std::optional<double> special_l2;
  /// q = inf, s = 0 form: ||u||_inf / (h^{m-d/2} ||u||_{H^m} + ||u||_{l2(X)}).
  std::optional<double> special_linf;
  bool zero_function = false;
};

SamplingResult sampling_residual(const TrialSpace& space, const VectorXd& coeffs, double s, double q_norm,
                                 const QuadratureRule& rule, double p = 2.0, double rho = 2.0);

/// ||u||_{H^alpha} / (||u||_{H^t}^{1-theta} ||u||_{H^m_order}^theta), theta = (alpha - t)/(m_order - t).
double gn_interpolation_check(const TrialSpace& space, const VectorXd& coeffs, double t, double alpha,
                              double m_order, const QuadratureRule& rule);

struct ExponentFit {
  double slope = 0.0;
  double stderr_slope = 0.0;
  double intercept = 0.0;
};

/// Least squares on (log scale, log value). Needs at least `min_pairs` pairs.
ExponentFit fit_exponent(const std::vector<std::pair<double, double>>& pairs, std::size_t min_pairs = 4);

/// Seeded random trial function: the interpolant of i.i.d. standard normal nodal data.
VectorXd random_trial_coefficients(const TrialSpace& space, std::uint64_t seed);

}  // namespace kerninv
