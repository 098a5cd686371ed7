#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mpls/errors.hpp"
#include "mpls/linalg.hpp"
#include "mpls/poafd.hpp"
#include "mpls/solution.hpp"
#include "mpls/types.hpp"

namespace mpls {

/// Minimum-norm least-squares answer X^+ y, with the underlying LS solves
/// kept for inspection.
template <typename Scalar>
struct PinvResult {
  DenseVector<Scalar> w_dagger;
  Scalar residual_norm{};
  Scalar solution_norm{};
  std::string method;
  std::vector<LsSolution<Scalar>> inner;
};

// Inner-solver handles: any callable (matrix, rhs) -> LsSolution works, so
// the two-step and one-step constructions stay generic over the LS method.

template <typename Scalar>
auto poafd_solver(SolveConfig<Scalar> cfg = {}) {
  return [cfg](const DenseMatrix<Scalar>& a, const DenseVector<Scalar>& b) {
    return solve_ls(a, b, cfg);
  };
}

namespace detail {

template <typename Scalar>
PinvResult<Scalar> finish_pinv(std::string method,
                               const DenseMatrix<Scalar>& x,
                               const DenseVector<Scalar>& y,
                               DenseVector<Scalar> w,
                               std::vector<LsSolution<Scalar>> inner) {
  PinvResult<Scalar> r;
  r.residual_norm = (x * w - y).norm();
  r.solution_norm = w.norm();
  r.w_dagger = std::move(w);
  r.method = std::move(method);
  r.inner = std::move(inner);
  return r;
}

template <typename Scalar, typename Solver>
LsSolution<Scalar> annotated_solve(Solver&& solve, const DenseMatrix<Scalar>& a,
                                   const DenseVector<Scalar>& b,
                                   const char* step) {
  try {
    return solve(a, b);
  } catch (const NumericalError& e) {
    throw NumericalError(std::string(step) + ": " + e.what());
  }
}

} // namespace detail

/// Two consecutive LS solves give the pseudo-inverse: W1 solves LS(X, y),
/// W2 solves LS(X^T, W1), and X^T W2 is the unique minimum-norm LS solution.
/// Any LS method works for either step.
template <typename Scalar, typename Solver>
PinvResult<Scalar> pinv_two_step(const DenseMatrix<Scalar>& x,
                                 const DenseVector<Scalar>& y,
                                 Solver&& solve) {
  if (x.rows() != y.size())
    throw DimensionError("pinv_two_step: rhs length mismatch");
  LsSolution<Scalar> step1 =
      detail::annotated_solve<Scalar>(solve, x, y, "two_step step 1 (X)");
  const DenseMatrix<Scalar> xt = x.transpose();
  LsSolution<Scalar> step2 = detail::annotated_solve<Scalar>(
      solve, xt, step1.w, "two_step step 2 (X^T)");
  DenseVector<Scalar> w = x.transpose() * step2.w;
  std::vector<LsSolution<Scalar>> inner;
  inner.push_back(std::move(step1));
  inner.push_back(std::move(step2));
  return detail::finish_pinv("two_step", x, y, std::move(w), std::move(inner));
}

template <typename Scalar>
PinvResult<Scalar> pinv_two_step(const DenseMatrix<Scalar>& x,
                                 const DenseVector<Scalar>& y,
                                 const SolveConfig<Scalar>& cfg = {}) {
  return pinv_two_step(x, y, poafd_solver<Scalar>(cfg));
}

/// One LS solve against the Gram product: any LS solution of (X X^T) W = y
/// yields the pseudo-inverse as X^T W. Forms the m-by-m product explicitly,
/// guarded by m_cap.
template <typename Scalar, typename Solver>
PinvResult<Scalar> pinv_one_step(const DenseMatrix<Scalar>& x,
                                 const DenseVector<Scalar>& y, Solver&& solve,
                                 Index m_cap = 5000) {
  if (x.rows() != y.size())
    throw DimensionError("pinv_one_step: rhs length mismatch");
  if (x.rows() > m_cap)
    throw PreconditionError("pinv_one_step: X X^T would be " +
                            std::to_string(x.rows()) + "x" +
                            std::to_string(x.rows()) + ", above the cap of " +
                            std::to_string(m_cap));
  const Index m = x.rows();
  DenseMatrix<Scalar> gram = DenseMatrix<Scalar>::Zero(m, m);
  gram.template selfadjointView<Eigen::Lower>().rankUpdate(x);
  gram = gram.template selfadjointView<Eigen::Lower>();
  LsSolution<Scalar> step = detail::annotated_solve<Scalar>(
      solve, gram, y, "one_step (X X^T)");
  DenseVector<Scalar> w = x.transpose() * step.w;
  std::vector<LsSolution<Scalar>> inner;
  inner.push_back(std::move(step));
  return detail::finish_pinv("one_step", x, y, std::move(w), std::move(inner));
}

template <typename Scalar>
PinvResult<Scalar> pinv_one_step(const DenseMatrix<Scalar>& x,
                                 const DenseVector<Scalar>& y,
                                 const SolveConfig<Scalar>& cfg = {},
                                 Index m_cap = 5000) {
  return pinv_one_step(x, y, poafd_solver<Scalar>(cfg), m_cap);
}

/// SVD route: X^+ y through the thin factors. The project-wide ground truth
/// the iterative constructions are checked against.
template <typename Scalar>
PinvResult<Scalar> pinv_svd(const DenseMatrix<Scalar>& x,
                            const DenseVector<Scalar>& y) {
  if (x.rows() != y.size())
    throw DimensionError("pinv_svd: rhs length mismatch");
  const SvdFactors<Scalar> f = jacobi_svd(x);
  DenseVector<Scalar> w = DenseVector<Scalar>::Zero(x.cols());
  if (f.rank() > 0)
    w = f.v * (f.u.transpose() * y).cwiseQuotient(f.sigma);
  return detail::finish_pinv("svd", x, y, std::move(w), {});
}

} // namespace mpls
