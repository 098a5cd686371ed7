#pragma once

#include <chrono>
#include <cmath>
#include <string>

#include "mpls/errors.hpp"
#include "mpls/linalg.hpp"
#include "mpls/solution.hpp"
#include "mpls/types.hpp"

namespace mpls {

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

} // namespace detail

/// Golub-Kahan bidiagonalization with QR updates (the Paige-Saunders scheme).
/// Converges when |r| <= btol |y| + atol |X|_F |w| or when
/// |X^T r| <= atol |X|_F |r|.
template <typename Scalar>
LsSolution<Scalar> lsqr(const DenseMatrix<Scalar>& x,
                        const DenseVector<Scalar>& y,
                        Scalar atol = Scalar(1e-10),
                        Scalar btol = Scalar(1e-10), Index max_iter = 0) {
  if (x.rows() != y.size()) throw DimensionError("lsqr: rhs length mismatch");
  if (max_iter <= 0) max_iter = 4 * std::min(x.rows(), x.cols());
  if (max_iter < 1) throw PreconditionError("lsqr: max_iter must be >= 1");
  const auto t0 = std::chrono::steady_clock::now();

  DenseVector<Scalar> sol = DenseVector<Scalar>::Zero(x.cols());
  DenseVector<Scalar> u = y;
  Scalar beta = u.norm();
  if (beta > 0) u /= beta;
  DenseVector<Scalar> v = beta > 0
                              ? DenseVector<Scalar>(x.transpose() * u)
                              : DenseVector<Scalar>::Zero(x.cols());
  Scalar alpha = v.norm();
  if (alpha > 0) v /= alpha;
  DenseVector<Scalar> w = v;

  const Scalar bnorm = beta;
  Scalar phibar = beta;
  Scalar rhobar = alpha;
  Scalar frob_sq = 0; // running |X|_F^2 estimate
  bool converged = alpha * beta == Scalar(0); // X^T y = 0: w = 0 is optimal
  Index iters = 0;

  while (!converged && iters < max_iter) {
    ++iters;
    u = x * v - alpha * u;
    beta = u.norm();
    if (beta > 0) u /= beta;
    frob_sq += alpha * alpha + beta * beta;
    v = x.transpose() * u - beta * v;
    alpha = v.norm();
    if (alpha > 0) v /= alpha;

    const Scalar rho = std::hypot(rhobar, beta);
    const Scalar c = rhobar / rho;
    const Scalar s = beta / rho;
    const Scalar theta = s * alpha;
    rhobar = -c * alpha;
    const Scalar phi = c * phibar;
    phibar = s * phibar;

    sol += (phi / rho) * w;
    w = v - (theta / rho) * w;

    const Scalar anorm = std::sqrt(frob_sq);
    const Scalar rnorm = phibar;
    const Scalar arnorm = alpha * std::abs(c) * phibar;
    if (rnorm <= btol * bnorm + atol * anorm * sol.norm()) converged = true;
    else if (rnorm > 0 && arnorm <= atol * anorm * rnorm) converged = true;
    else if (beta == Scalar(0) || alpha == Scalar(0))
      converged = true; // Krylov space exhausted: iterate is the LS point
  }

  return make_solution("lsqr", x, y, std::move(sol), iters, converged,
                       detail::seconds_since(t0));
}

/// Conjugate gradients on the normal equations in factored (CGLS) form.
/// Converges when |X^T (X w - y)| <= tol |X^T y|.
template <typename Scalar>
LsSolution<Scalar> cgls(const DenseMatrix<Scalar>& x,
                        const DenseVector<Scalar>& y, Scalar tol = Scalar(1e-10),
                        Index max_iter = 0) {
  if (x.rows() != y.size()) throw DimensionError("cgls: rhs length mismatch");
  if (max_iter <= 0) max_iter = 4 * std::min(x.rows(), x.cols());
  if (max_iter < 1) throw PreconditionError("cgls: max_iter must be >= 1");
  const auto t0 = std::chrono::steady_clock::now();

  DenseVector<Scalar> sol = DenseVector<Scalar>::Zero(x.cols());
  DenseVector<Scalar> r = y;
  DenseVector<Scalar> s = x.transpose() * r;
  Scalar gamma = s.squaredNorm();
  const Scalar stop = tol * std::sqrt(gamma);
  bool converged = gamma == Scalar(0);
  Index iters = 0;
  DenseVector<Scalar> p = s;

  while (!converged && iters < max_iter) {
    ++iters;
    const DenseVector<Scalar> q = x * p;
    const Scalar qq = q.squaredNorm();
    if (qq == Scalar(0)) break; // search direction in the null space
    const Scalar step = gamma / qq;
    sol += step * p;
    r -= step * q;
    s = x.transpose() * r;
    const Scalar gamma_next = s.squaredNorm();
    if (std::sqrt(gamma_next) <= stop) {
      converged = true;
      break;
    }
    p = s + (gamma_next / gamma) * p;
    gamma = gamma_next;
  }

  return make_solution("cgls", x, y, std::move(sol), iters, converged,
                       detail::seconds_since(t0));
}

/// Ridge regression: solve (X^T X + lambda I) w = X^T y by Cholesky.
/// lambda = 0 requires X^T X to be positive definite.
template <typename Scalar>
LsSolution<Scalar> ridge(const DenseMatrix<Scalar>& x,
                         const DenseVector<Scalar>& y, Scalar lambda) {
  if (x.rows() != y.size()) throw DimensionError("ridge: rhs length mismatch");
  if (lambda < 0) throw PreconditionError("ridge: lambda must be >= 0");
  const auto t0 = std::chrono::steady_clock::now();

  const Index n = x.cols();
  DenseMatrix<Scalar> gram = DenseMatrix<Scalar>::Zero(n, n);
  gram.template selfadjointView<Eigen::Lower>().rankUpdate(x.transpose());
  gram = gram.template selfadjointView<Eigen::Lower>();
  gram.diagonal().array() += lambda;
  DenseVector<Scalar> sol = cholesky_solve<Scalar>(gram, x.transpose() * y);

  return make_solution("ridge", x, y, std::move(sol), 1, true,
                       detail::seconds_since(t0));
}

/// Principal component regression: regress y on the k leading singular
/// directions. k above the numerical rank is clamped to it; the effective k
/// is reported in the iterations field.
template <typename Scalar>
LsSolution<Scalar> pcr(const DenseMatrix<Scalar>& x,
                       const DenseVector<Scalar>& y, Index k) {
  if (x.rows() != y.size()) throw DimensionError("pcr: rhs length mismatch");
  if (k < 0) throw PreconditionError("pcr: k must be >= 0");
  const auto t0 = std::chrono::steady_clock::now();

  const SvdFactors<Scalar> f = jacobi_svd(x);
  const Index k_eff = std::min(k, f.rank());
  DenseVector<Scalar> sol = DenseVector<Scalar>::Zero(x.cols());
  if (k_eff > 0)
    sol = f.v.leftCols(k_eff) *
          (f.u.leftCols(k_eff).transpose() * y).cwiseQuotient(
              f.sigma.head(k_eff));

  return make_solution("pcr", x, y, std::move(sol), k_eff, true,
                       detail::seconds_since(t0));
}

/// Cyclic coordinate descent for (1/2)|Xw - y|^2 + lambda |w|_1 with exact
/// soft-threshold updates. Converged when every coordinate satisfies its
/// subgradient condition within tol * max(1, |X^T y|_inf).
template <typename Scalar>
LsSolution<Scalar> lasso_cd(const DenseMatrix<Scalar>& x,
                            const DenseVector<Scalar>& y, Scalar lambda,
                            Scalar tol = Scalar(1e-8), Index max_iter = 1000) {
  if (x.rows() != y.size())
    throw DimensionError("lasso_cd: rhs length mismatch");
  if (lambda <= 0) throw PreconditionError("lasso_cd: lambda must be > 0");
  if (max_iter < 1) throw PreconditionError("lasso_cd: max_iter must be >= 1");
  const auto t0 = std::chrono::steady_clock::now();

  const Index n = x.cols();
  DenseVector<Scalar> col_sq(n);
  for (Index j = 0; j < n; ++j) {
    col_sq[j] = x.col(j).squaredNorm();
    if (col_sq[j] == Scalar(0))
      throw PreconditionError("lasso_cd: column " + std::to_string(j) +
                              " is zero");
  }
  const Scalar scale =
      std::max(Scalar(1), (x.transpose() * y).cwiseAbs().maxCoeff());

  DenseVector<Scalar> w = DenseVector<Scalar>::Zero(n);
  DenseVector<Scalar> r = y;
  const auto soft = [](Scalar z, Scalar t) {
    return std::copysign(std::max(std::abs(z) - t, Scalar(0)), z);
  };

  bool converged = false;
  Index sweeps = 0;
  while (sweeps < max_iter) {
    ++sweeps;
    for (Index j = 0; j < n; ++j) {
      const Scalar rho = x.col(j).dot(r) + col_sq[j] * w[j];
      const Scalar w_next = soft(rho, lambda) / col_sq[j];
      if (w_next != w[j]) {
        r -= (w_next - w[j]) * x.col(j);
        w[j] = w_next;
      }
    }
    const DenseVector<Scalar> g = x.transpose() * r;
    Scalar viol = 0;
    for (Index j = 0; j < n; ++j) {
      if (w[j] != Scalar(0))
        viol = std::max(viol, std::abs(g[j] - lambda * (w[j] > 0 ? Scalar(1)
                                                                 : Scalar(-1))));
      else
        viol = std::max(viol, std::max(Scalar(0), std::abs(g[j]) - lambda));
    }
    if (viol <= tol * scale) {
      converged = true;
      break;
    }
  }

  return make_solution("lasso", x, y, std::move(w), sweeps, converged,
                       detail::seconds_since(t0));
}

} // namespace mpls
