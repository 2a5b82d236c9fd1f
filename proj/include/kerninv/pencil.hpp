#pragma once

#include "kerninv/types.hpp"

namespace kerninv {

/// Upper-triangular R with R^T R equal to a denominator Gram.
struct SquareRoot {
  MatrixXd r;
  double jitter = 0.0;
  int escalations = 0;
  bool via_cholesky = false;  ///< true when the jittered-Cholesky path produced R

  Eigen::Index size() const { return r.rows(); }
  /// Ratio of smallest to largest |R_ii|, a cheap conditioning indicator.
  double diag_ratio() const;
};

/// Streaming Householder QR: feeds blocks of rows B_i and keeps R of the stacked matrix,
/// so R^T R = sum_i B_i^T B_i without forming the (squared-condition) Gram.
class RowFactorizer {
 public:
  explicit RowFactorizer(Eigen::Index n);

  void add(const MatrixXd& rows);

  /// R of everything added. A numerically rank-deficient R is replaced by the jittered
  /// Cholesky factor of R^T R.
  SquareRoot finish() const;

 private:
  Eigen::Index n_;
  MatrixXd r_;
};

SquareRoot square_root_from_rows(const MatrixXd& rows);

/// Jittered Cholesky of a Gram (upper factor returned).
SquareRoot square_root_from_gram(const MatrixXd& gram);

/// R^{-T} A R^{-1}, symmetrized.
MatrixXd reduce_pencil(const MatrixXd& numerator, const SquareRoot& den);

/// Largest eigenvalue of the pencil (A, R^T R) and its extremizer c = R^{-1} y, normalized
/// so that c^T R^T R c = 1.
struct TopEigen {
  double lambda = 0.0;
  VectorXd extremizer;
};

TopEigen top_generalized_eigen(const MatrixXd& numerator, const SquareRoot& den);

}  // namespace kerninv
