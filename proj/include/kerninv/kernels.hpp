#pragma once

#include "kerninv/geometry.hpp"
#include "kerninv/types.hpp"

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace kerninv {

/// Partial-derivative orders (alpha_1, alpha_2); the second entry is unused when d = 1.
using MultiIndex = std::array<int, 2>;

inline int order(const MultiIndex& a) { return a[0] + a[1]; }

/// All distinct multi-indices of total order k in dimension d (lexicographic).
std::vector<MultiIndex> multi_indices(int k, int dim);

/// One term coef * (x - y)^beta * f_k(r) of an expanded radial derivative.
struct DerivativeTerm {
  double coef = 0.0;
  MultiIndex beta{0, 0};
  int k = 0;
};

/// D^alpha_x phi(|x - y|) as a sum of monomials times the radial factors
/// f_k = ((1/r) d/dr)^k phi.
std::vector<DerivativeTerm> derivative_terms(const MultiIndex& alpha, int dim);

/// Half-integer Matern kernel with Fourier decay (1 + |xi|^2)^{-m} in R^d, lengthscale 1.
/// nu = m - d/2 must be one of 1/2, 3/2, 5/2, 7/2.
class MaternKernel {
 public:
  MaternKernel(double m, int dim, double amplitude = 1.0);

  double m() const { return m_; }
  int dim() const { return dim_; }
  double nu() const { return p_ + 0.5; }
  /// p = nu - 1/2, the degree of the polynomial factor.
  int degree() const { return p_; }
  double amplitude() const { return amplitude_; }
  /// Highest derivative order available: floor(m) = nu + 1/2.
  int max_derivative_order() const { return p_ + 1; }

  /// amplitude * P_p(r) * exp(-r).
  template <typename Scalar>
  Scalar profile(Scalar r) const {
    using std::exp;
    Scalar poly;
    switch (p_) {
      case 0: poly = Scalar(1); break;
      case 1: poly = Scalar(1) + r; break;
      case 2: poly = Scalar(1) + r + r * r / Scalar(3); break;
      default: poly = Scalar(1) + r + Scalar(2) * r * r / Scalar(5) + r * r * r / Scalar(15); break;
    }
    return Scalar(amplitude_) * poly * exp(-r);
  }

  double operator()(const Eigen::Ref<const Eigen::VectorXd>& x,
                    const Eigen::Ref<const Eigen::VectorXd>& y) const {
    return profile((x - y).norm());
  }

  /// f_k(r) = ((1/r) d/dr)^k phi(r) for 0 <= k <= p + 1; f_{p+1} is singular at r = 0.
  double radial_factor(int k, double r) const;
  /// f_0 .. f_kmax at r with a single exponential; f_{p+1}(0) is reported as 0.
  void radial_factors(double r, int kmax, double* out) const;

  /// D^alpha of x -> phi(|x - y|). At r = 0 the odd terms vanish by symmetry.
  double derivative(const MultiIndex& alpha, const Eigen::Ref<const Eigen::VectorXd>& x,
                    const Eigen::Ref<const Eigen::VectorXd>& y) const;

  bool operator==(const MaternKernel&) const = default;

 private:
  double m_;
  int dim_;
  int p_;
  double amplitude_;
  std::array<double, 5> c_{};  // c_[k] = prod_{i<=k} 1/(2(nu-i)), the scale in f_k
};

/// Supported m values for a dimension, as listed in docs/config.md.
std::vector<double> supported_smoothness(int dim);

/// Ambient kernel evaluated on the circle only. Its native space is H^tau(S^1), tau = m - 1/2.
struct RestrictedKernel {
  MaternKernel base;
  Manifold manifold;
  double tau = 0.0;

  double operator()(const Eigen::Ref<const Eigen::VectorXd>& x,
                    const Eigen::Ref<const Eigen::VectorXd>& y) const {
    return base(x, y);
  }
  /// Kernel between two angles through the chord length 2|sin((a - b)/2)|.
  double angular(double a, double b) const {
    return base.profile(2.0 * std::abs(std::sin(0.5 * (a - b))) * manifold.radius);
  }
};

RestrictedKernel restrict_kernel(const MaternKernel& k, const Manifold& M);

/// Span of kernel translates at the nodes, on a domain or on the circle.
class TrialSpace {
 public:
  TrialSpace(MaternKernel kernel, PointSet nodes);

  const MaternKernel& kernel() const { return kernel_; }
  const PointSet& nodes() const { return nodes_; }
  const Host& host() const { return nodes_.host; }
  bool on_manifold() const { return restricted_.has_value(); }
  /// Smoothness of the native space: m on domains, tau = m - 1/2 on the circle.
  double smoothness() const { return restricted_ ? restricted_->tau : kernel_.m(); }
  Eigen::Index size() const { return nodes_.size(); }

  /// (i, j) entry: D^alpha phi(p_i, x_j).
  MatrixXd basis_matrix(const PointsXd& points, const MultiIndex& alpha = {0, 0}) const;

  /// Same as basis_matrix for a block of rows, writing into `out`.
  void basis_block(const PointsXd& points, Eigen::Index begin, Eigen::Index count,
                   const MultiIndex& alpha, MatrixXd& out) const;

 private:
  MaternKernel kernel_;
  PointSet nodes_;
  std::optional<RestrictedKernel> restricted_;
};

/// Kernel Gram Phi_ij = phi(x_i, x_j); symmetric by construction.
MatrixXd gram_matrix(const TrialSpace& space);

/// Cholesky with the diagonal jitter policy: lambda * trace/n added with lambda = 1e-12,
/// escalating by 10 up to 1e-8. `try_plain` attempts the unjittered matrix first.
struct JitteredCholesky {
  Eigen::LLT<MatrixXd> llt;
  double jitter = 0.0;  ///< absolute diagonal shift applied
  int escalations = 0;  ///< number of x10 steps beyond the first jitter level
};

JitteredCholesky jittered_cholesky(const MatrixXd& a, bool try_plain = false);

/// Coefficients c with Phi c = values.
VectorXd interpolate(const TrialSpace& space, const VectorXd& values);

/// u(p) = sum_j c_j phi(p, x_j).
VectorXd evaluate_trial(const TrialSpace& space, const VectorXd& coeffs, const PointsXd& points,
                        const MultiIndex& alpha = {0, 0});

}  // namespace kerninv
