#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace kerninv {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Point clouds are stored one point per row (N x d).
template <typename Scalar>
using Points = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using VectorXd = Vector<double>;
using MatrixXd = Matrix<double>;
using PointsXd = Points<double>;

/// Precondition or argument violation detected before any numerics ran.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical failure: factorization breakdown, under-resolved spectra, ...
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace kerninv
