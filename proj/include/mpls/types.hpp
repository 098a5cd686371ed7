#pragma once

#include <Eigen/Dense>

namespace mpls {

using Index = Eigen::Index;

/// Dense column-accessible matrix; the workhorse for measurement matrices,
/// induced matrices, orthonormal systems and Gram products alike.
template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matrixd = DenseMatrix<double>;
using Vectord = DenseVector<double>;

/// Machine epsilon used in rank tolerances, fixed for IEEE doubles.
inline constexpr double kMachineEps = 2.22e-16;

template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived>& m) {
  return m.derived().array().isFinite().all();
}

} // namespace mpls
