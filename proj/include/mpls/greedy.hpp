#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "mpls/errors.hpp"
#include "mpls/linalg.hpp"
#include "mpls/solution.hpp"
#include "mpls/types.hpp"

namespace mpls {

/// Step-by-step record of a pursuit over a unit-norm dictionary. The
/// per-step lists share one length; coefficients holds one entry per chosen
/// atom (raw inner products for the plain algorithm, refit least-squares
/// coefficients for the orthogonal one).
template <typename Scalar>
struct PursuitTrace {
  std::vector<Index> chosen;
  std::vector<Scalar> per_step_score;
  std::vector<Scalar> per_step_residual_norm;
  DenseVector<Scalar> coefficients;
};

namespace detail {

template <typename Scalar>
void require_unit_columns(const DenseMatrix<Scalar>& dict, const char* who) {
  for (Index k = 0; k < dict.cols(); ++k)
    if (std::abs(dict.col(k).norm() - Scalar(1)) > Scalar(1e-10))
      throw PreconditionError(std::string(who) + ": dictionary column " +
                              std::to_string(k) + " is not unit norm");
}

} // namespace detail

/// Plain greedy algorithm: at each step pick the atom most correlated with
/// the running remainder (smallest index on ties) and subtract that rank-one
/// projection. Atoms may be re-picked.
template <typename Scalar>
PursuitTrace<Scalar> ga_decompose(const DenseMatrix<Scalar>& dict,
                                  const DenseVector<Scalar>& f, Index steps) {
  detail::require_unit_columns(dict, "ga_decompose");
  if (f.size() != dict.rows())
    throw DimensionError("ga_decompose: signal length mismatch");
  if (steps < 1) throw PreconditionError("ga_decompose: steps must be >= 1");

  PursuitTrace<Scalar> trace;
  std::vector<Scalar> coeffs;
  DenseVector<Scalar> remainder = f;
  for (Index step = 0; step < steps; ++step) {
    Index best = 0;
    Scalar best_score = std::abs(dict.col(0).dot(remainder));
    for (Index k = 1; k < dict.cols(); ++k) {
      const Scalar score = std::abs(dict.col(k).dot(remainder));
      if (score > best_score) {
        best = k;
        best_score = score;
      }
    }
    const Scalar c = dict.col(best).dot(remainder);
    remainder -= c * dict.col(best);
    trace.chosen.push_back(best);
    trace.per_step_score.push_back(best_score);
    trace.per_step_residual_norm.push_back(remainder.norm());
    coeffs.push_back(c);
  }
  trace.coefficients =
      Eigen::Map<DenseVector<Scalar>>(coeffs.data(),
                                      static_cast<Index>(coeffs.size()));
  return trace;
}

/// Orthogonal greedy algorithm (orthogonal matching pursuit): pick the atom
/// most correlated with the orthogonal remainder, then re-project f onto the
/// span of everything chosen so far. Coefficients are the least-squares refit
/// on the chosen set. Terminates early once every score drops below
/// sel_tol * |f|.
template <typename Scalar>
PursuitTrace<Scalar> oga_decompose(const DenseMatrix<Scalar>& dict,
                                   const DenseVector<Scalar>& f, Index steps,
                                   Scalar sel_tol = Scalar(1e-12)) {
  detail::require_unit_columns(dict, "oga_decompose");
  if (f.size() != dict.rows())
    throw DimensionError("oga_decompose: signal length mismatch");
  if (steps < 1) throw PreconditionError("oga_decompose: steps must be >= 1");

  PursuitTrace<Scalar> trace;
  const Scalar f_norm = f.norm();
  DenseVector<Scalar> h = f; // orthogonal remainder
  std::vector<DenseVector<Scalar>> basis;
  std::vector<std::vector<Scalar>> r_cols; // MGS factor of chosen atoms
  std::vector<bool> used(static_cast<std::size_t>(dict.cols()), false);

  for (Index step = 0; step < steps; ++step) {
    Index best = -1;
    Scalar best_score = 0;
    for (Index k = 0; k < dict.cols(); ++k) {
      if (used[static_cast<std::size_t>(k)]) continue;
      const Scalar score = std::abs(dict.col(k).dot(h));
      if (best < 0 || score > best_score) {
        best = k;
        best_score = score;
      }
    }
    if (best < 0 || best_score <= sel_tol * f_norm) break;

    DenseVector<Scalar> atom = dict.col(best);
    std::vector<Scalar> r_col;
    for (const auto& u : basis) {
      const Scalar c = u.dot(atom);
      atom -= c * u;
      r_col.push_back(c);
    }
    const Scalar norm = atom.norm();
    if (norm <= Scalar(1e-12)) break; // atom inside the chosen span
    atom /= norm;
    r_col.push_back(norm);

    h -= atom.dot(h) * atom;
    used[static_cast<std::size_t>(best)] = true;
    basis.push_back(std::move(atom));
    r_cols.push_back(std::move(r_col));
    trace.chosen.push_back(best);
    trace.per_step_score.push_back(best_score);
    trace.per_step_residual_norm.push_back(h.norm());
  }

  // Refit: solve R c = U^T f for the chosen atoms.
  const Index chosen = static_cast<Index>(trace.chosen.size());
  if (chosen > 0) {
    DenseMatrix<Scalar> r = DenseMatrix<Scalar>::Zero(chosen, chosen);
    DenseVector<Scalar> rhs(chosen);
    for (Index j = 0; j < chosen; ++j) {
      for (Index i = 0; i <= j; ++i)
        r(i, j) = r_cols[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
      rhs[j] = basis[static_cast<std::size_t>(j)].dot(f);
    }
    trace.coefficients = back_substitute(r, rhs);
  } else {
    trace.coefficients.resize(0);
  }
  return trace;
}

/// Unit-norm dictionary built from matrix columns; zero columns are dropped
/// and source_cols maps atoms back to the original column indices.
template <typename Scalar>
struct Dictionary {
  DenseMatrix<Scalar> atoms;
  std::vector<Index> source_cols;
};

template <typename Scalar>
Dictionary<Scalar> make_dictionary(const DenseMatrix<Scalar>& x,
                                   Scalar zero_tol = Scalar(1e-12)) {
  std::vector<Index> keep;
  for (Index k = 0; k < x.cols(); ++k)
    if (x.col(k).norm() > zero_tol * std::max(Scalar(1), x.col(k).norm()))
      keep.push_back(k);
  Dictionary<Scalar> dict;
  dict.atoms.resize(x.rows(), static_cast<Index>(keep.size()));
  for (std::size_t i = 0; i < keep.size(); ++i)
    dict.atoms.col(static_cast<Index>(i)) = x.col(keep[i]).normalized();
  dict.source_cols = std::move(keep);
  return dict;
}

/// Forward-selection baseline: orthogonal pursuit over the normalized columns
/// of x, with the refit coefficients mapped back to original coordinates.
template <typename Scalar>
LsSolution<Scalar> fs_solve(const DenseMatrix<Scalar>& x,
                            const DenseVector<Scalar>& y, Index steps,
                            Scalar sel_tol = Scalar(1e-12)) {
  Dictionary<Scalar> dict = make_dictionary(x);
  DenseVector<Scalar> w = DenseVector<Scalar>::Zero(x.cols());
  Index used_steps = 0;
  if (dict.atoms.cols() > 0) {
    PursuitTrace<Scalar> trace =
        oga_decompose(dict.atoms, y, std::min(steps, dict.atoms.cols()),
                      sel_tol);
    used_steps = static_cast<Index>(trace.chosen.size());
    for (Index j = 0; j < used_steps; ++j) {
      const Index atom = trace.chosen[static_cast<std::size_t>(j)];
      const Index col = dict.source_cols[static_cast<std::size_t>(atom)];
      w[col] += trace.coefficients[j] / x.col(col).norm();
    }
  }
  return make_solution("fs", x, y, std::move(w), used_steps, true);
}

} // namespace mpls
