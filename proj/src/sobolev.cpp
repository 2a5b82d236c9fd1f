#include "kerninv/sobolev.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

namespace kerninv {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr Eigen::Index kRowBlock = 8192;

void check_order_budget(const TrialSpace& space, int k) {
  if (k < 0) throw InvalidArgument("negative Sobolev order");
  if (k > space.kernel().max_derivative_order()) {
    std::ostringstream os;
    os << "derivative order " << k << " exceeds the kernel's budget floor(m) = "
       << space.kernel().max_derivative_order();
    throw InvalidArgument(os.str());
  }
}

// |x - y|^{-e}, with repeated multiplication when e is an integer.
struct InversePower {
  double e;
  int ie;
  bool integer;
  explicit InversePower(double exponent)
      : e(exponent), ie(static_cast<int>(std::lround(exponent))), integer(std::abs(exponent - std::round(exponent)) < 1e-14) {}
  double operator()(double r2) const {
    if (integer) {
      double p = 1.0;
      const double r = (ie % 2 == 0) ? 1.0 : std::sqrt(r2);
      for (int i = 0; i < ie / 2; ++i) p *= r2;
      return 1.0 / (p * r);
    }
    return std::pow(r2, -0.5 * e);
  }
};

void check_fractional(double t, int dim, Eigen::Index grid_size) {
  if (!(t > 0.0 && t < 1.0)) throw InvalidArgument("fractional part t must lie in (0, 1)");
  if (dim == 2 && grid_size > kMaxGagliardoNodes2d) {
    std::ostringstream os;
    os << "fractional orders in two dimensions are limited to grids of at most "
       << kMaxGagliardoNodes2d << " nodes (requested " << grid_size
       << "); lower the quadrature level";
    throw InvalidArgument(os.str());
  }
}

bool is_pow2(Eigen::Index n) { return n > 0 && (n & (n - 1)) == 0; }

// Fourier coefficients u_k = (1/n) sum_j u_j e^{-i k theta_j} and their signed frequencies.
std::vector<std::complex<double>> spectrum(const VectorXd& samples) {
  Eigen::FFT<double> fft;
  std::vector<double> in(samples.data(), samples.data() + samples.size());
  std::vector<std::complex<double>> out;
  fft.fwd(out, in);
  const double inv = 1.0 / static_cast<double>(samples.size());
  for (auto& c : out) c *= inv;
  return out;
}

double frequency(Eigen::Index j, Eigen::Index n) {
  return static_cast<double>(j < n / 2 ? j : j - n);
}

void aliasing_guard(const std::vector<std::complex<double>>& u) {
  const auto n = static_cast<Eigen::Index>(u.size());
  double total = 0.0, top = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double e = std::norm(u[static_cast<std::size_t>(j)]);
    total += e;
    if (std::abs(frequency(j, n)) >= 0.375 * static_cast<double>(n)) top += e;
  }
  if (total > 0.0 && top > 1e-8 * total)
    throw NumericalError("under-resolved: top-quarter spectrum holds more than 1e-8 of the energy");
}

}  // namespace

FractionalSplit split_order(double s) {
  if (!(s >= 0.0)) throw InvalidArgument("Sobolev order must be >= 0");
  FractionalSplit out;
  out.k = static_cast<int>(std::floor(s + 1e-12));
  out.t = s - out.k;
  if (std::abs(out.t) < 1e-12) out.t = 0.0;
  return out;
}

IntegerAssembly assemble_integer_grams(const TrialSpace& space, int max_order, const QuadratureRule& rule,
                                       int root_order) {
  check_order_budget(space, max_order);
  check_order_budget(space, root_order < 0 ? 0 : root_order);
  const int top = std::max(max_order, root_order);
  if (rule.nodes.cols() != space.kernel().dim())
    throw InvalidArgument("quadrature rule dimension does not match the kernel");
  const Eigen::Index n = space.size();
  IntegerAssembly out;
  out.seminorms.assign(static_cast<std::size_t>(max_order + 1), MatrixXd::Zero(n, n));
  std::optional<RowFactorizer> root;
  if (root_order >= 0) root.emplace(n);

  std::vector<std::vector<MultiIndex>> alphas;
  for (int k = 0; k <= top; ++k) alphas.push_back(multi_indices(k, space.kernel().dim()));

  const Eigen::Index block = std::max(kRowBlock, 2 * n);
  MatrixXd b;
  for (Eigen::Index start = 0; start < rule.size(); start += block) {
    const Eigen::Index c = std::min(block, rule.size() - start);
    const VectorXd sw = rule.weights.segment(start, c).cwiseSqrt();
    for (int k = 0; k <= top; ++k) {
      for (const auto& alpha : alphas[static_cast<std::size_t>(k)]) {
        space.basis_block(rule.nodes, start, c, alpha, b);
        b = sw.asDiagonal() * b;
        if (k <= max_order)
          out.seminorms[static_cast<std::size_t>(k)].selfadjointView<Eigen::Lower>().rankUpdate(b.transpose());
        if (k <= root_order) root->add(b);
      }
    }
  }
  for (auto& g : out.seminorms) g = MatrixXd(g.selfadjointView<Eigen::Lower>());
  if (root) out.root = root->finish();
  return out;
}

SobolevGram integer_seminorm_gram(const TrialSpace& space, int k, const QuadratureRule& rule) {
  check_order_budget(space, k);
  auto assembled = assemble_integer_grams(space, k, rule);
  SobolevGram g;
  g.order = k;
  g.kind = GramKind::Seminorm;
  g.matrix = std::move(assembled.seminorms.back());
  // Earlier orders were computed as a by-product; only order k is returned.
  g.rule_level = rule.level;
  return g;
}

SobolevGram gagliardo_seminorm_gram(const TrialSpace& space, int k, double t, const QuadratureRule& rule) {
  check_order_budget(space, k);
  const int dim = space.kernel().dim();
  check_fractional(t, dim, rule.size());
  if (rule.nodes.cols() != dim) throw InvalidArgument("quadrature rule dimension does not match the kernel");
  const QuadratureRule other = offset_rule(rule);
  const double eps = panel_width(rule);
  const double eps2 = eps * eps;
  const InversePower inv(dim + 2.0 * t);
  const Eigen::Index n = space.size();
  const Eigen::Index qa = rule.size();
  const Eigen::Index qb = other.size();

  SobolevGram g;
  g.order = k + t;
  g.kind = GramKind::Seminorm;
  g.rule_level = rule.level;
  g.matrix = MatrixXd::Zero(n, n);

  // Kernel weights do not depend on alpha: row sums r1, column sums r2, and K in blocks.
  VectorXd r1 = VectorXd::Zero(qa);
  VectorXd r2 = VectorXd::Zero(qb);
  double dropped = 0.0;
  const Eigen::Index block = 512;
  auto kernel_block = [&](Eigen::Index start, Eigen::Index c, MatrixXd& kb, double* drop) {
    kb.resize(c, qb);
    for (Eigen::Index y = 0; y < qb; ++y)
      for (Eigen::Index i = 0; i < c; ++i) {
        const Eigen::Index x = start + i;
        double r2v = 0.0;
        for (int a = 0; a < dim; ++a) {
          const double dlt = rule.nodes(x, a) - other.nodes(y, a);
          r2v += dlt * dlt;
        }
        const double w = rule.weights(x) * other.weights(y);
        if (r2v < eps2) {
          kb(i, y) = 0.0;
          if (drop) *drop += w;
        } else {
          kb(i, y) = w * inv(r2v);
        }
      }
  };
  MatrixXd kb;
  for (Eigen::Index start = 0; start < qa; start += block) {
    const Eigen::Index c = std::min(block, qa - start);
    kernel_block(start, c, kb, &dropped);
    r1.segment(start, c) = kb.rowwise().sum();
    r2 += kb.colwise().sum().transpose();
  }
  g.dropped_measure = dropped;

  for (const auto& alpha : multi_indices(k, dim)) {
    const MatrixXd b1 = space.basis_matrix(rule.nodes, alpha);
    const MatrixXd b2 = space.basis_matrix(other.nodes, alpha);
    MatrixXd kb2(qa, n);
    for (Eigen::Index start = 0; start < qa; start += block) {
      const Eigen::Index c = std::min(block, qa - start);
      kernel_block(start, c, kb, nullptr);
      kb2.middleRows(start, c).noalias() = kb * b2;
    }
    const MatrixXd cross = b1.transpose() * kb2;
    g.matrix.noalias() += b1.transpose() * r1.asDiagonal() * b1;
    g.matrix.noalias() += b2.transpose() * r2.asDiagonal() * b2;
    g.matrix -= cross + cross.transpose();
  }
  g.matrix = 0.5 * (g.matrix + g.matrix.transpose()).eval();
  return g;
}

SobolevGram h_norm_gram(const TrialSpace& space, double s, const QuadratureRule& rule) {
  if (s > space.kernel().m() + 1e-12) throw InvalidArgument("Sobolev order exceeds the kernel smoothness m");
  const auto split = split_order(s);
  auto assembled = assemble_integer_grams(space, split.k, rule);
  SobolevGram g;
  g.order = s;
  g.kind = GramKind::FullNorm;
  g.rule_level = rule.level;
  g.matrix = MatrixXd::Zero(space.size(), space.size());
  for (const auto& m : assembled.seminorms) g.matrix += m;
  if (split.t > 0.0) {
    const auto frac = gagliardo_seminorm_gram(space, split.k, split.t, rule);
    g.matrix += frac.matrix;
    g.dropped_measure = frac.dropped_measure;
  }
  return g;
}

GagliardoValue gagliardo_seminorm(const ScalarField& f, double t, const QuadratureRule& rule) {
  const int dim = static_cast<int>(rule.nodes.cols());
  if (!(t > 0.0 && t < 1.0)) throw InvalidArgument("fractional part t must lie in (0, 1)");
  const QuadratureRule other = offset_rule(rule);
  const double eps2 = std::pow(panel_width(rule), 2);
  const InversePower inv(dim + 2.0 * t);
  VectorXd fa(rule.size()), fb(other.size());
  for (Eigen::Index i = 0; i < rule.size(); ++i) fa(i) = f(rule.nodes.row(i).transpose());
  for (Eigen::Index i = 0; i < other.size(); ++i) fb(i) = f(other.nodes.row(i).transpose());
  GagliardoValue out;
  VectorXd row_sums(rule.size());
  for (Eigen::Index x = 0; x < rule.size(); ++x) {
    double acc = 0.0, drop = 0.0;
    for (Eigen::Index y = 0; y < other.size(); ++y) {
      double r2 = 0.0;
      for (int a = 0; a < dim; ++a) {
        const double dlt = rule.nodes(x, a) - other.nodes(y, a);
        r2 += dlt * dlt;
      }
      const double w = other.weights(y);
      if (r2 < eps2) {
        drop += w;
        continue;
      }
      const double df = fa(x) - fb(y);
      acc += w * df * df * inv(r2);
    }
    row_sums(x) = rule.weights(x) * acc;
    out.dropped_measure += rule.weights(x) * drop;
  }
  out.value = std::sqrt(pairwise_sum(row_sums.data(), row_sums.size()));
  return out;
}

double circle_spectral_norm(const VectorXd& samples, double beta) {
  if (!is_pow2(samples.size()) || samples.size() < 64)
    throw InvalidArgument("spectral norm needs a power-of-two sample count >= 64");
  if (!(beta >= 0.0)) throw InvalidArgument("spectral order must be >= 0");
  const auto u = spectrum(samples);
  aliasing_guard(u);
  const Eigen::Index n = samples.size();
  double sum = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double k = frequency(j, n);
    sum += std::pow(1.0 + k * k, beta) * std::norm(u[static_cast<std::size_t>(j)]);
  }
  return std::sqrt(kTwoPi * sum);
}

PointsXd circle_samples(int K) {
  if (K < 0 || K > 24) throw InvalidArgument("sample exponent out of range");
  const Eigen::Index n = Eigen::Index{1} << K;
  PointsXd p(n, 2);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double t = kTwoPi * static_cast<double>(j) / static_cast<double>(n);
    p.row(j) << std::cos(t), std::sin(t);
  }
  return p;
}

SobolevGram circle_sobolev_gram(const TrialSpace& space, double beta, int K) {
  if (!space.on_manifold()) throw InvalidArgument("circle Sobolev Gram needs a restricted-kernel space");
  if (!(beta >= 0.0) || beta > space.smoothness() + 1e-12)
    throw InvalidArgument("spectral order beta must satisfy 0 <= beta <= tau");
  if (K < 6) throw InvalidArgument("spectral norm needs a power-of-two sample count >= 64");
  const MatrixXd b = space.basis_matrix(circle_samples(K));
  const Eigen::Index n = b.rows();
  const Eigen::Index cols = b.cols();
  MatrixXd fr(n, cols), fi(n, cols);
  VectorXd weight(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double k = frequency(j, n);
    weight(j) = std::sqrt(kTwoPi * std::pow(1.0 + k * k, beta));
  }
  for (Eigen::Index c = 0; c < cols; ++c) {
    const auto u = spectrum(b.col(c));
    aliasing_guard(u);
    for (Eigen::Index j = 0; j < n; ++j) {
      fr(j, c) = weight(j) * u[static_cast<std::size_t>(j)].real();
      fi(j, c) = weight(j) * u[static_cast<std::size_t>(j)].imag();
    }
  }
  SobolevGram g;
  g.order = beta;
  g.kind = GramKind::FullNorm;
  g.rule_level = K;
  g.matrix = fr.transpose() * fr + fi.transpose() * fi;
  g.matrix = 0.5 * (g.matrix + g.matrix.transpose()).eval();
  return g;
}

SquareRoot circle_l2_root(const TrialSpace& space, int K) {
  if (!space.on_manifold()) throw InvalidArgument("circle mass factor needs a restricted-kernel space");
  const MatrixXd b = space.basis_matrix(circle_samples(K));
  return square_root_from_rows(std::sqrt(kTwoPi / static_cast<double>(b.rows())) * b);
}

}  // namespace kerninv
