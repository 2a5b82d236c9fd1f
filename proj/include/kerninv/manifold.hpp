#pragma once

#include "kerninv/estimators.hpp"
#include "kerninv/geometry.hpp"
#include "kerninv/quadrature.hpp"

#include <functional>

namespace kerninv {

/// u o R_cp on the band annulus(1 - delta, 1 + delta): constant along radial rays.
struct BandExtension {
  ScalarField base;  ///< evaluated at points of the unit circle
  double delta = 0.0;
  Domain band;

  double operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const;
};

BandExtension extend_constant_normal(ScalarField u, double delta);

/// ||u o R_cp||_{L2(band)} / (sqrt(2 delta) ||u||_{L2(S^1)}), both by quadrature at `level`
/// (the band and circle rules share their 2^{level+4} angles).
double equivalence_ratio_extension(const ScalarField& u, double delta, int level);

/// True when beta lies in [0, floor(tau - 1/2)], the range of the trial-space equivalence.
bool trial_equivalence_admissible(double beta, double tau);

/// ||u||_{H^beta(band)} / (delta^{1/2} ||u||_{H^beta(S^1)}) for a circle trial function.
/// The band norm uses quadrature at `band_level`; the circle norm 2^K spectral samples.
/// Zero coefficients return 1 by convention.
double trial_equivalence_ratio(const TrialSpace& space, const VectorXd& coeffs, double delta, double beta,
                               int band_level, int K);

/// Both sides of |f(0)|^p <= 2^{p-1}/(2 delta) int |f|^p + 2^{p-1} delta^{p-1} int |f'|^p
/// over [-delta, delta], by composite Gauss with 2^6 panels.
struct PoincareResult {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

PoincareResult poincare_check(const std::function<double(double)>& f, const std::function<double(double)>& df,
                              double delta, double p);

/// True when beta lies in (d_M/2, tau] or [0, floor(tau - 1/2)].
bool manifold_bernstein_admissible(double beta, double tau);

/// sup ||u||_{H^beta(S^1)} / ||u||_{L2(S^1)} with spectral norms from 2^K samples.
ConstantEstimate manifold_bernstein_constant(const TrialSpace& space, double beta, int K);

/// max over 2^eval_exponent angles of sqrt(k^T M^{-1} k), M the circle mass matrix at 2^K samples.
ConstantEstimate manifold_nikolskii_constant(const TrialSpace& space, int K, int eval_exponent);

}  // namespace kerninv
