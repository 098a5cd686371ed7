#pragma once

#include <string>
#include <utility>

#include "mpls/errors.hpp"
#include "mpls/types.hpp"

namespace mpls {

/// One least-squares answer: the solution vector plus the numbers every
/// method comparison needs. residual_norm and solution_norm are recomputed
/// from (x, y, w) at construction, never copied from solver internals.
template <typename Scalar>
struct LsSolution {
  DenseVector<Scalar> w;
  Scalar residual_norm{};
  Scalar solution_norm{};
  std::string method;
  Index iterations = 0;
  bool converged = true;
  double wall_time_s = 0.0;
};

template <typename Scalar>
LsSolution<Scalar> make_solution(std::string method,
                                 const DenseMatrix<Scalar>& x,
                                 const DenseVector<Scalar>& y,
                                 DenseVector<Scalar> w, Index iterations,
                                 bool converged, double wall_time_s = 0.0) {
  if (x.rows() != y.size() || x.cols() != w.size())
    throw DimensionError("make_solution: inconsistent dimensions");
  LsSolution<Scalar> s;
  s.residual_norm = (x * w - y).norm();
  s.solution_norm = w.norm();
  s.w = std::move(w);
  s.method = std::move(method);
  s.iterations = iterations;
  s.converged = converged;
  s.wall_time_s = wall_time_s;
  return s;
}

} // namespace mpls
