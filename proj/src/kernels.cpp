#include "kerninv/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace kerninv {

std::vector<MultiIndex> multi_indices(int k, int dim) {
  if (k < 0) throw InvalidArgument("negative derivative order");
  if (dim == 1) return {MultiIndex{k, 0}};
  std::vector<MultiIndex> out;
  for (int a = k; a >= 0; --a) out.push_back({a, k - a});
  return out;
}

std::vector<DerivativeTerm> derivative_terms(const MultiIndex& alpha, int dim) {
  if (alpha[0] < 0 || alpha[1] < 0) throw InvalidArgument("negative multi-index entry");
  if (dim == 1 && alpha[1] != 0) throw InvalidArgument("second multi-index entry must be 0 for d = 1");
  std::vector<DerivativeTerm> terms{{1.0, {0, 0}, 0}};
  for (int axis = 0; axis < 2; ++axis) {
    for (int rep = 0; rep < alpha[axis]; ++rep) {
      // d/dx_i [x^beta f_k] = beta_i x^{beta - e_i} f_k + x^{beta + e_i} f_{k+1}
      std::vector<DerivativeTerm> next;
      auto add = [&next](double coef, MultiIndex beta, int k) {
        for (auto& t : next)
          if (t.beta == beta && t.k == k) {
            t.coef += coef;
            return;
          }
        next.push_back({coef, beta, k});
      };
      for (const auto& t : terms) {
        if (t.beta[axis] > 0) {
          MultiIndex b = t.beta;
          --b[axis];
          add(t.coef * t.beta[axis], b, t.k);
        }
        MultiIndex b = t.beta;
        ++b[axis];
        add(t.coef, b, t.k + 1);
      }
      terms = std::move(next);
    }
  }
  return terms;
}

namespace {

int degree_for(double m, int dim) {
  if (dim != 1 && dim != 2) throw InvalidArgument("kernel dimension must be 1 or 2");
  const double nu = m - 0.5 * dim;
  for (int p = 0; p <= 3; ++p)
    if (std::abs(nu - (p + 0.5)) < 1e-12) return p;
  std::ostringstream os;
  os << "unsupported smoothness m = " << m << " for d = " << dim
     << " (nu = m - d/2 must be 1/2, 3/2, 5/2 or 7/2)";
  throw InvalidArgument(os.str());
}

}  // namespace

MaternKernel::MaternKernel(double m, int dim, double amplitude)
    : m_(m), dim_(dim), p_(degree_for(m, dim)), amplitude_(amplitude) {
  if (!(amplitude > 0.0)) throw InvalidArgument("kernel amplitude must be positive");
  c_[0] = 1.0;
  for (int k = 1; k <= p_; ++k) c_[k] = c_[k - 1] / (2.0 * (nu() - k));
  // f_{p+1} continues the same recursion with the e^{-r}/r endpoint.
  c_[p_ + 1] = c_[p_];
}

std::vector<double> supported_smoothness(int dim) {
  if (dim == 1) return {1.0, 2.0, 3.0, 4.0};
  if (dim == 2) return {1.5, 2.5, 3.5, 4.5};
  throw InvalidArgument("kernel dimension must be 1 or 2");
}

double MaternKernel::radial_factor(int k, double r) const {
  if (k < 0 || k > p_ + 1) throw InvalidArgument("radial derivative order exceeds kernel smoothness");
  const double sign = (k % 2 == 0) ? 1.0 : -1.0;
  if (k == p_ + 1) return sign * amplitude_ * c_[k] * std::exp(-r) / r;
  // ((1/r) d/dr)^k phi_nu = (-1)^k c_k phi_{nu-k}
  const double e = std::exp(-r);
  double poly;
  switch (p_ - k) {
    case 0: poly = 1.0; break;
    case 1: poly = 1.0 + r; break;
    case 2: poly = 1.0 + r + r * r / 3.0; break;
    default: poly = 1.0 + r + 2.0 * r * r / 5.0 + r * r * r / 15.0; break;
  }
  return sign * amplitude_ * c_[k] * poly * e;
}

void MaternKernel::radial_factors(double r, int kmax, double* out) const {
  const double e = amplitude_ * std::exp(-r);
  for (int k = 0; k <= kmax; ++k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    if (k == p_ + 1) {
      out[k] = r == 0.0 ? 0.0 : sign * c_[k] * e / r;
      continue;
    }
    double poly;
    switch (p_ - k) {
      case 0: poly = 1.0; break;
      case 1: poly = 1.0 + r; break;
      case 2: poly = 1.0 + r + r * r / 3.0; break;
      default: poly = 1.0 + r + 2.0 * r * r / 5.0 + r * r * r / 15.0; break;
    }
    out[k] = sign * c_[k] * poly * e;
  }
}

double MaternKernel::derivative(const MultiIndex& alpha, const Eigen::Ref<const Eigen::VectorXd>& x,
                                const Eigen::Ref<const Eigen::VectorXd>& y) const {
  if (order(alpha) > max_derivative_order())
    throw InvalidArgument("derivative order exceeds floor(m)");
  const auto terms = derivative_terms(alpha, dim_);
  const Eigen::VectorXd diff = x - y;
  const double r = diff.norm();
  double sum = 0.0;
  for (const auto& t : terms) {
    const int nb = t.beta[0] + t.beta[1];
    if (r == 0.0) {
      if (nb > 0) continue;
      sum += t.coef * radial_factor(t.k, 0.0);
      continue;
    }
    double mono = std::pow(diff(0), t.beta[0]);
    if (dim_ == 2) mono *= std::pow(diff(1), t.beta[1]);
    sum += t.coef * mono * radial_factor(t.k, r);
  }
  return sum;
}

RestrictedKernel restrict_kernel(const MaternKernel& k, const Manifold& M) {
  if (k.dim() != Manifold::ambient_dim)
    throw InvalidArgument("restriction to the circle needs an ambient kernel with d = 2");
  const double tau = k.m() - 0.5 * (Manifold::ambient_dim - Manifold::intrinsic_dim);
  if (!(tau > 0.5 * Manifold::intrinsic_dim))
    throw InvalidArgument("restricted smoothness tau = m - 1/2 must exceed d_M/2");
  return RestrictedKernel{k, M, tau};
}

TrialSpace::TrialSpace(MaternKernel kernel, PointSet nodes)
    : kernel_(std::move(kernel)), nodes_(std::move(nodes)) {
  if (nodes_.size() == 0) throw InvalidArgument("empty node set");
  if (nodes_.dim() != kernel_.dim())
    throw InvalidArgument("kernel dimension does not match node dimension");
  if (const auto* m = std::get_if<Manifold>(&nodes_.host)) restricted_ = restrict_kernel(kernel_, *m);
  if (nodes_.size() >= 2 && !(nodes_.q > 0.0)) throw InvalidArgument("coalescing nodes");
}

void TrialSpace::basis_block(const PointsXd& points, Eigen::Index begin, Eigen::Index count,
                             const MultiIndex& alpha, MatrixXd& out) const {
  if (points.cols() != kernel_.dim()) throw InvalidArgument("evaluation point dimension mismatch");
  if (order(alpha) > kernel_.max_derivative_order())
    throw InvalidArgument("derivative order exceeds floor(m)");
  const auto terms = derivative_terms(alpha, kernel_.dim());
  const int kmax = std::max_element(terms.begin(), terms.end(), [](const auto& a, const auto& b) {
                     return a.k < b.k;
                   })->k;
  const Eigen::Index n = size();
  const int d = kernel_.dim();
  out.resize(count, n);
  std::array<double, 5> f{};
  for (Eigen::Index j = 0; j < n; ++j) {
    const double xj0 = nodes_.points(j, 0);
    const double xj1 = d == 2 ? nodes_.points(j, 1) : 0.0;
    for (Eigen::Index i = 0; i < count; ++i) {
      const double d0 = points(begin + i, 0) - xj0;
      const double d1 = d == 2 ? points(begin + i, 1) - xj1 : 0.0;
      const double r = std::sqrt(d0 * d0 + d1 * d1);
      if (kmax == 0) {
        out(i, j) = kernel_.profile(r);
        continue;
      }
      kernel_.radial_factors(r, kmax, f.data());
      double sum = 0.0;
      for (const auto& t : terms) {
        double mono = 1.0;
        for (int e = 0; e < t.beta[0]; ++e) mono *= d0;
        for (int e = 0; e < t.beta[1]; ++e) mono *= d1;
        if (r == 0.0 && t.beta[0] + t.beta[1] > 0) continue;
        sum += t.coef * mono * f[static_cast<std::size_t>(t.k)];
      }
      out(i, j) = sum;
    }
  }
}

MatrixXd TrialSpace::basis_matrix(const PointsXd& points, const MultiIndex& alpha) const {
  MatrixXd out;
  basis_block(points, 0, points.rows(), alpha, out);
  return out;
}

MatrixXd gram_matrix(const TrialSpace& space) {
  const auto& x = space.nodes().points;
  const Eigen::Index n = space.size();
  MatrixXd g(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    g(j, j) = space.kernel().profile(0.0);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double v = space.kernel().profile((x.row(i) - x.row(j)).norm());
      g(i, j) = v;
      g(j, i) = v;
    }
  }
  return g;
}

JitteredCholesky jittered_cholesky(const MatrixXd& a, bool try_plain) {
  if (a.rows() != a.cols()) throw InvalidArgument("Cholesky needs a square matrix");
  JitteredCholesky out;
  if (!a.allFinite()) throw NumericalError("matrix has non-finite entries");
  if (try_plain) {
    out.llt.compute(a);
    if (out.llt.info() == Eigen::Success) return out;
  }
  const double n = static_cast<double>(std::max<Eigen::Index>(a.rows(), 1));
  const double scale = std::max(a.trace() / n, std::numeric_limits<double>::min());
  int step = 0;
  for (double lambda = 1e-12; lambda <= 1e-8 * (1.0 + 1e-9); lambda *= 10.0, ++step) {
    MatrixXd b = a;
    b.diagonal().array() += lambda * scale;
    out.llt.compute(b);
    if (out.llt.info() == Eigen::Success) {
      out.jitter = lambda * scale;
      out.escalations = step;
      return out;
    }
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(a, Eigen::EigenvaluesOnly);
  std::ostringstream os;
  os.precision(3);
  os << "matrix not positive definite after maximum jitter (1e-8 * trace/n); eigenvalue range ["
     << es.eigenvalues().minCoeff() << ", " << es.eigenvalues().maxCoeff() << "]";
  throw NumericalError(os.str());
}

VectorXd interpolate(const TrialSpace& space, const VectorXd& values) {
  if (values.size() != space.size()) throw InvalidArgument("value count does not match node count");
  if (values.isZero(0.0)) return VectorXd::Zero(values.size());
  const auto chol = jittered_cholesky(gram_matrix(space), true);
  return chol.llt.solve(values);
}

VectorXd evaluate_trial(const TrialSpace& space, const VectorXd& coeffs, const PointsXd& points,
                        const MultiIndex& alpha) {
  if (coeffs.size() != space.size()) throw InvalidArgument("coefficient count does not match node count");
  constexpr Eigen::Index kChunk = 2048;
  VectorXd out(points.rows());
  MatrixXd block;
  for (Eigen::Index b = 0; b < points.rows(); b += kChunk) {
    const Eigen::Index c = std::min(kChunk, points.rows() - b);
    space.basis_block(points, b, c, alpha, block);
    out.segment(b, c).noalias() = block * coeffs;
  }
  return out;
}

}  // namespace kerninv
