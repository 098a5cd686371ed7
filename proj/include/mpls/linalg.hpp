#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "mpls/errors.hpp"
#include "mpls/types.hpp"

namespace mpls {

/// Euclidean inner product.
template <typename Scalar>
Scalar inner(const DenseVector<Scalar>& u, const DenseVector<Scalar>& v) {
  if (u.size() != v.size())
    throw DimensionError("inner: length mismatch " + std::to_string(u.size()) +
                         " vs " + std::to_string(v.size()));
  return u.dot(v);
}

/// Gram-Schmidt co-projection Q_u(v) = v - <v,u>u, the component of v
/// orthogonal to the unit vector u.
template <typename Scalar>
DenseVector<Scalar> coproject(const DenseVector<Scalar>& v,
                              const DenseVector<Scalar>& u_unit) {
  if (v.size() != u_unit.size())
    throw DimensionError("coproject: length mismatch " +
                         std::to_string(v.size()) + " vs " +
                         std::to_string(u_unit.size()));
  const Scalar norm = u_unit.norm();
  if (std::abs(norm - Scalar(1)) > Scalar(1e-10))
    throw PreconditionError("coproject: direction is not unit norm (|u| = " +
                            std::to_string(static_cast<double>(norm)) + ")");
  return v - u_unit.dot(v) * u_unit;
}

/// Solve r x = b for upper-triangular r by back substitution.
template <typename Scalar>
DenseVector<Scalar> back_substitute(const DenseMatrix<Scalar>& r,
                                    const DenseVector<Scalar>& b) {
  if (r.rows() != r.cols())
    throw DimensionError("back_substitute: matrix is not square");
  if (r.rows() != b.size())
    throw DimensionError("back_substitute: rhs length mismatch");
  const Scalar diag_max = r.diagonal().cwiseAbs().maxCoeff();
  for (Index i = 0; i < r.rows(); ++i)
    if (std::abs(r(i, i)) <= Scalar(1e-14) * diag_max)
      throw SingularMatrixError(
          "back_substitute: near-zero diagonal at index " + std::to_string(i));
  return r.template triangularView<Eigen::Upper>().solve(b);
}

/// Solve a x = b for symmetric positive-definite a via Cholesky.
template <typename Scalar>
DenseVector<Scalar> cholesky_solve(const DenseMatrix<Scalar>& a,
                                   const DenseVector<Scalar>& b) {
  if (a.rows() != a.cols())
    throw DimensionError("cholesky_solve: matrix is not square");
  if (a.rows() != b.size())
    throw DimensionError("cholesky_solve: rhs length mismatch");
  const Scalar scale = a.cwiseAbs().maxCoeff();
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > Scalar(1e-12) * scale)
    throw PreconditionError("cholesky_solve: matrix is not symmetric");
  Eigen::LLT<DenseMatrix<Scalar>> llt(a);
  if (llt.info() != Eigen::Success)
    throw FactorizationError("cholesky_solve: matrix is not positive definite");
  return llt.solve(b);
}

/// Thin SVD restricted to the numerical rank: u (m x r), sigma (r, descending,
/// all > rank_tol), v (n x r).
template <typename Scalar>
struct SvdFactors {
  DenseMatrix<Scalar> u;
  DenseVector<Scalar> sigma;
  DenseMatrix<Scalar> v;
  Scalar rank_tol{};

  Index rank() const { return sigma.size(); }
};

namespace detail {

// Orthogonalize the columns of w by plane rotations, accumulating them in v.
// Returns false if the sweep limit is hit before all column pairs are
// orthogonal to within the relative threshold.
template <typename Scalar>
bool one_sided_jacobi(DenseMatrix<Scalar>& w, DenseMatrix<Scalar>& v,
                      int max_sweeps) {
  const Index n = w.cols();
  const Scalar thresh = Scalar(10) * Scalar(kMachineEps);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool rotated = false;
    for (Index p = 0; p < n - 1; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        const Scalar app = w.col(p).squaredNorm();
        const Scalar aqq = w.col(q).squaredNorm();
        const Scalar apq = w.col(p).dot(w.col(q));
        if (app == Scalar(0) || aqq == Scalar(0)) continue;
        if (std::abs(apq) <= thresh * std::sqrt(app * aqq)) continue;
        rotated = true;
        const Scalar zeta = (aqq - app) / (Scalar(2) * apq);
        const Scalar t = std::copysign(
            Scalar(1) / (std::abs(zeta) + std::hypot(Scalar(1), zeta)), zeta);
        const Scalar c = Scalar(1) / std::hypot(Scalar(1), t);
        const Scalar s = c * t;
        w.applyOnTheRight(p, q, Eigen::JacobiRotation<Scalar>(c, s));
        v.applyOnTheRight(p, q, Eigen::JacobiRotation<Scalar>(c, s));
      }
    }
    if (!rotated) return true;
  }
  return false;
}

} // namespace detail

/// One-sided Jacobi SVD. The rank tolerance is
/// max(rows, cols) * eps_machine * sigma_max.
template <typename Scalar>
SvdFactors<Scalar> jacobi_svd(const DenseMatrix<Scalar>& m) {
  if (!all_finite(m))
    throw PreconditionError("jacobi_svd: input has non-finite entries");

  // One-sided Jacobi wants at least as many rows as columns; factor the
  // transpose otherwise and swap the roles of u and v.
  const bool flipped = m.rows() < m.cols();
  DenseMatrix<Scalar> w = flipped ? m.transpose() : m;
  const Index n = w.cols();
  DenseMatrix<Scalar> v = DenseMatrix<Scalar>::Identity(n, n);

  if (!detail::one_sided_jacobi(w, v, 50))
    throw ConvergenceError("jacobi_svd: no convergence within 50 sweeps");

  DenseVector<Scalar> norms(n);
  for (Index j = 0; j < n; ++j) norms[j] = w.col(j).norm();

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index(0));
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return norms[a] > norms[b]; });

  const Scalar sigma_max = n > 0 ? norms[order.front()] : Scalar(0);
  const Scalar rank_tol = Scalar(std::max(m.rows(), m.cols())) *
                          Scalar(kMachineEps) * sigma_max;
  Index rank = 0;
  while (rank < n && norms[order[static_cast<std::size_t>(rank)]] > rank_tol)
    ++rank;

  SvdFactors<Scalar> f;
  f.rank_tol = rank_tol;
  f.sigma.resize(rank);
  f.u.resize(w.rows(), rank);
  f.v.resize(n, rank);
  for (Index j = 0; j < rank; ++j) {
    const Index src = order[static_cast<std::size_t>(j)];
    f.sigma[j] = norms[src];
    f.u.col(j) = w.col(src) / norms[src];
    f.v.col(j) = v.col(src);
  }
  if (flipped) std::swap(f.u, f.v);
  return f;
}

} // namespace mpls
