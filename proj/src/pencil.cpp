#include "kerninv/pencil.hpp"

#include "kerninv/kernels.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

namespace kerninv {

namespace {

// Below this |R_ii| ratio the triangular solves amplify roundoff beyond use.
constexpr double kRankTolerance = 1e-14;

}  // namespace

double SquareRoot::diag_ratio() const {
  if (r.rows() == 0) return 0.0;
  const VectorXd d = r.diagonal().cwiseAbs();
  const double hi = d.maxCoeff();
  return hi > 0.0 ? d.minCoeff() / hi : 0.0;
}

RowFactorizer::RowFactorizer(Eigen::Index n) : n_(n), r_(MatrixXd::Zero(n, n)) {
  if (n < 1) throw InvalidArgument("factorization needs at least one column");
}

void RowFactorizer::add(const MatrixXd& rows) {
  if (rows.cols() != n_) throw InvalidArgument("row block has the wrong column count");
  if (rows.rows() == 0) return;
  MatrixXd stacked(n_ + rows.rows(), n_);
  stacked.topRows(n_) = r_;
  stacked.bottomRows(rows.rows()) = rows;
  Eigen::HouseholderQR<MatrixXd> qr(stacked);
  r_ = qr.matrixQR().topRows(n_).triangularView<Eigen::Upper>();
}

SquareRoot RowFactorizer::finish() const {
  SquareRoot out;
  out.r = r_;
  if (out.diag_ratio() > kRankTolerance) return out;
  return square_root_from_gram(r_.transpose() * r_);
}

SquareRoot square_root_from_rows(const MatrixXd& rows) {
  RowFactorizer f(rows.cols());
  f.add(rows);
  return f.finish();
}

SquareRoot square_root_from_gram(const MatrixXd& gram) {
  const auto chol = jittered_cholesky(gram);
  SquareRoot out;
  out.r = chol.llt.matrixU();
  out.jitter = chol.jitter;
  out.escalations = chol.escalations;
  out.via_cholesky = true;
  return out;
}

MatrixXd reduce_pencil(const MatrixXd& numerator, const SquareRoot& den) {
  if (numerator.rows() != den.size() || numerator.cols() != den.size())
    throw InvalidArgument("pencil matrices have different sizes");
  const auto rt = den.r.triangularView<Eigen::Upper>().transpose();
  MatrixXd x = rt.solve(numerator);                       // R^{-T} A
  MatrixXd a = rt.solve(MatrixXd(x.transpose()));          // R^{-T} A R^{-1}
  return 0.5 * (a + a.transpose());
}

TopEigen top_generalized_eigen(const MatrixXd& numerator, const SquareRoot& den) {
  const MatrixXd a = reduce_pencil(numerator, den);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(a);
  if (es.info() != Eigen::Success) throw NumericalError("symmetric eigensolver did not converge");
  const Eigen::Index top = a.rows() - 1;
  TopEigen out;
  out.lambda = es.eigenvalues()(top);
  out.extremizer = den.r.triangularView<Eigen::Upper>().solve(es.eigenvectors().col(top));
  return out;
}

}  // namespace kerninv
