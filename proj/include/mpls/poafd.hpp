#pragma once

#include <chrono>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mpls/errors.hpp"
#include "mpls/linalg.hpp"
#include "mpls/solution.hpp"
#include "mpls/types.hpp"

namespace mpls {

/// Tolerances and limits for the matching-pursuit solver. A column counts as
/// numerically zero when its norm drops below zero_col_tol relative to
/// max(1, original column norm); a score below sel_tol * |y| counts as
/// orthogonal to y. Ties between equal scores go to the smallest column
/// index.
template <typename Scalar>
struct SolveConfig {
  Scalar zero_col_tol = Scalar(1e-12);
  Scalar sel_tol = Scalar(1e-12);
  std::optional<Index> max_select{}; // default: the column count
  bool reorth = true;
};

/// The orthonormal system built by the pursuit: selected column indices in
/// selection order, the orthonormal columns u, the upper-triangular factor r
/// with X_selected = u * r, and the coefficients a_l = <y, u_l>. |a_l| is the
/// selection score of step l.
template <typename Scalar>
struct PoafdModel {
  std::vector<Index> selected;
  DenseMatrix<Scalar> u;
  DenseMatrix<Scalar> r;
  DenseVector<Scalar> a;
  Scalar y_norm{};

  Index steps() const { return static_cast<Index>(selected.size()); }
};

/// Pick the column of x_cur most correlated with y after normalization:
/// argmax |<y, col/|col|>| over columns that are not excluded, not
/// numerically zero (relative to col_scale), and not orthogonal to y.
/// Returns the (index, score) pair, or nothing when no column qualifies.
template <typename Scalar>
std::optional<std::pair<Index, Scalar>> select_column(
    const DenseMatrix<Scalar>& x_cur, const DenseVector<Scalar>& y,
    const SolveConfig<Scalar>& cfg, const std::vector<bool>& excluded,
    const DenseVector<Scalar>& col_scale) {
  if (x_cur.cols() < 1)
    throw DimensionError("select_column: matrix has no columns");
  if (y.size() != x_cur.rows())
    throw DimensionError("select_column: rhs length mismatch");
  if (col_scale.size() != x_cur.cols())
    throw DimensionError("select_column: column scale length mismatch");

  const Scalar y_norm = y.norm();
  Index best = -1;
  Scalar best_score = 0;
  for (Index k = 0; k < x_cur.cols(); ++k) {
    if (k < static_cast<Index>(excluded.size()) &&
        excluded[static_cast<std::size_t>(k)])
      continue;
    const Scalar norm = x_cur.col(k).norm();
    if (norm <= cfg.zero_col_tol * col_scale[k]) continue;
    const Scalar score = std::abs(y.dot(x_cur.col(k))) / norm;
    if (score <= cfg.sel_tol * y_norm) continue;
    if (best < 0 || score > best_score) {
      best = k;
      best_score = score;
    }
  }
  if (best < 0) return std::nullopt;
  return std::make_pair(best, best_score);
}

template <typename Scalar>
std::optional<std::pair<Index, Scalar>> select_column(
    const DenseMatrix<Scalar>& x_cur, const DenseVector<Scalar>& y,
    const SolveConfig<Scalar>& cfg = {},
    const std::vector<bool>& excluded = {}) {
  DenseVector<Scalar> scale(x_cur.cols());
  for (Index k = 0; k < x_cur.cols(); ++k)
    scale[k] = std::max(Scalar(1), x_cur.col(k).norm());
  return select_column(x_cur, y, cfg, excluded, scale);
}

/// Run the pursuit: repeatedly select the best column of the induced matrix,
/// normalize it into u_l, and co-project every surviving column against u_l.
/// Stops when every column is numerically zero or orthogonal to y, or after
/// max_select steps.
template <typename Scalar>
PoafdModel<Scalar> poafd_iterate(const DenseMatrix<Scalar>& x,
                                 const DenseVector<Scalar>& y,
                                 const SolveConfig<Scalar>& cfg = {}) {
  const Index m = x.rows();
  const Index n = x.cols();
  if (y.size() != m) throw DimensionError("poafd_iterate: rhs length mismatch");

  const Index max_select = std::min(cfg.max_select.value_or(n), n);

  DenseMatrix<Scalar> work = x;
  DenseVector<Scalar> scale(n);
  std::vector<bool> excluded(static_cast<std::size_t>(n), false);
  // Original squared column norms; the selective reorthogonalization trigger
  // compares the selected column's current mass against these.
  DenseVector<Scalar> orig_sq(n);
  for (Index k = 0; k < n; ++k) {
    const Scalar norm = work.col(k).norm();
    scale[k] = std::max(Scalar(1), norm);
    orig_sq[k] = norm * norm;
    if (norm <= cfg.zero_col_tol * scale[k]) {
      excluded[static_cast<std::size_t>(k)] = true;
      work.col(k).setZero();
    }
  }

  PoafdModel<Scalar> model;
  model.y_norm = y.norm();
  std::vector<DenseVector<Scalar>> basis;       // u_1 .. u_L
  std::vector<DenseVector<Scalar>> coef_rows;   // row l: <x^(l)_k, u_l> per k
  std::vector<Scalar> coeffs;                   // a_l

  while (model.steps() < max_select) {
    auto pick = select_column(work, y, cfg, excluded, scale);
    if (!pick) break;
    const Index k = pick->first;

    DenseVector<Scalar> col = work.col(k);
    // Plain MGS drifts when a column has lost most of its mass to the
    // selected span; one extra pass against the current basis restores
    // orthogonality ("twice is enough"). The trigger is cumulative loss
    // against the original column, since the drop may have happened many
    // steps before the column gets selected.
    if (cfg.reorth && !basis.empty() &&
        col.squaredNorm() < Scalar(0.5) * orig_sq[k]) {
      for (std::size_t j = 0; j < basis.size(); ++j) {
        const Scalar c = basis[j].dot(col);
        col -= c * basis[j];
        coef_rows[j][k] += c;
      }
    }
    const Scalar norm = col.norm();
    if (norm <= cfg.zero_col_tol * scale[k]) {
      // The extra pass exposed the column as dependent; drop it and rescan.
      excluded[static_cast<std::size_t>(k)] = true;
      work.col(k).setZero();
      continue;
    }

    DenseVector<Scalar> u = col / norm;
    const Scalar a = y.dot(u);

    // Co-project the whole induced matrix, preserving column order. The
    // selected column itself lands on zero and is excluded from future scans.
    DenseVector<Scalar> row = DenseVector<Scalar>::Zero(n);
    for (Index k2 = 0; k2 < n; ++k2) {
      if (k2 == k || excluded[static_cast<std::size_t>(k2)]) continue;
      const Scalar c = u.dot(work.col(k2));
      row[k2] = c;
      work.col(k2) -= c * u;
      if (work.col(k2).norm() <= cfg.zero_col_tol * scale[k2]) {
        excluded[static_cast<std::size_t>(k2)] = true;
        work.col(k2).setZero();
      }
    }
    row[k] = norm; // exact by construction: col = norm * u
    excluded[static_cast<std::size_t>(k)] = true;
    work.col(k).setZero();

    model.selected.push_back(k);
    basis.push_back(std::move(u));
    coef_rows.push_back(std::move(row));
    coeffs.push_back(a);
  }

  const Index steps = model.steps();
  model.u.resize(m, steps);
  model.r = DenseMatrix<Scalar>::Zero(steps, steps);
  model.a.resize(steps);
  for (Index l = 0; l < steps; ++l) {
    model.u.col(l) = basis[static_cast<std::size_t>(l)];
    model.a[l] = coeffs[static_cast<std::size_t>(l)];
    for (Index j = 0; j <= l; ++j)
      model.r(j, l) =
          coef_rows[static_cast<std::size_t>(j)][model.selected[
              static_cast<std::size_t>(l)]];
  }
  return model;
}

/// Scatter the model coefficients back into an n-vector: zero outside the
/// selected indices, back-substituted through r on them.
template <typename Scalar>
DenseVector<Scalar> assemble_solution(const PoafdModel<Scalar>& model,
                                      Index n) {
  for (Index k : model.selected)
    if (k >= n)
      throw DimensionError("assemble_solution: selected index " +
                           std::to_string(k) + " out of range for n = " +
                           std::to_string(n));
  DenseVector<Scalar> w = DenseVector<Scalar>::Zero(n);
  if (model.steps() == 0) return w;
  const DenseVector<Scalar> w_sel = back_substitute(model.r, model.a);
  for (Index l = 0; l < model.steps(); ++l)
    w[model.selected[static_cast<std::size_t>(l)]] = w_sel[l];
  return w;
}

/// Full pursuit solve: iterate, assemble, and report residual, norm, step
/// count and wall time.
template <typename Scalar>
LsSolution<Scalar> solve_ls(const DenseMatrix<Scalar>& x,
                            const DenseVector<Scalar>& y,
                            const SolveConfig<Scalar>& cfg = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  PoafdModel<Scalar> model = poafd_iterate(x, y, cfg);
  DenseVector<Scalar> w = assemble_solution(model, x.cols());
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return make_solution("poafd", x, y, std::move(w), model.steps(), true,
                       elapsed);
}

} // namespace mpls
