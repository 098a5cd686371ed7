#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "mpls/greedy.hpp"

using namespace mpls;

namespace {

Matrixd random_unit_dictionary(Index rows, Index atoms, std::uint32_t seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss;
  Matrixd d(rows, atoms);
  for (Index j = 0; j < atoms; ++j) {
    for (Index i = 0; i < rows; ++i) d(i, j) = gauss(rng);
    d.col(j).normalize();
  }
  return d;
}

Vectord random_vector(Index len, std::uint32_t seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss;
  Vectord v(len);
  for (Index i = 0; i < len; ++i) v[i] = gauss(rng);
  return v;
}

Matrixd correlated_dict() {
  Matrixd d(2, 2);
  d << 1, 0.8, 0, 0.6;
  return d;
}

} // namespace

TEST_CASE("ga on an orthonormal dictionary") {
  Vectord f(2);
  f << 3, 4;
  const PursuitTrace<double> trace =
      ga_decompose<double>(Matrixd::Identity(2, 2), f, 2);
  REQUIRE(trace.chosen.size() == 2);
  CHECK(trace.chosen[0] == 1);
  CHECK(trace.chosen[1] == 0);
  CHECK(trace.per_step_residual_norm[1] == doctest::Approx(0.0));
}

TEST_CASE("ga with a zero signal keeps zero scores and residuals") {
  const Vectord f = Vectord::Zero(2);
  const PursuitTrace<double> trace =
      ga_decompose<double>(Matrixd::Identity(2, 2), f, 3);
  REQUIRE(trace.chosen.size() == 3);
  for (double s : trace.per_step_score) CHECK(s == 0.0);
  for (double r : trace.per_step_residual_norm) CHECK(r == 0.0);
}

TEST_CASE("ga matches the hand-iterated recursion") {
  // Oracle (hand computation): atoms (1,0) and (0.8,0.6), f = (1,1).
  //   step 1 picks atom 1 with <f,e2> = 1.4, remainder (-0.12, 0.16)
  //   step 2 picks atom 0 with -0.12, remainder (0, 0.16)
  //   step 3 picks atom 1 with 0.096, remainder norm 0.128
  Vectord f(2);
  f << 1, 1;
  const PursuitTrace<double> trace =
      ga_decompose<double>(correlated_dict(), f, 3);
  REQUIRE(trace.chosen.size() == 3);
  CHECK(trace.chosen[0] == 1);
  CHECK(trace.chosen[1] == 0);
  CHECK(trace.chosen[2] == 1);
  CHECK(trace.per_step_residual_norm[0] == doctest::Approx(0.2));
  CHECK(trace.per_step_residual_norm[1] == doctest::Approx(0.16));
  CHECK(trace.per_step_residual_norm[2] == doctest::Approx(0.128));
  CHECK(trace.coefficients[0] == doctest::Approx(1.4));
  CHECK(trace.coefficients[1] == doctest::Approx(-0.12));
  CHECK(trace.coefficients[2] == doctest::Approx(0.096));
}

TEST_CASE("ga rejects non-normalized dictionaries") {
  Matrixd d(2, 1);
  d << 2, 0;
  CHECK_THROWS_AS(ga_decompose<double>(d, random_vector(2, 1), 1),
                  PreconditionError);
  CHECK_THROWS_AS(
      oga_decompose<double>(d, random_vector(2, 1), 1), PreconditionError);
}

TEST_CASE("oga equals ga on an orthonormal dictionary") {
  Vectord f(2);
  f << 3, 4;
  const PursuitTrace<double> ga =
      ga_decompose<double>(Matrixd::Identity(2, 2), f, 2);
  const PursuitTrace<double> oga =
      oga_decompose<double>(Matrixd::Identity(2, 2), f, 2);
  CHECK(ga.chosen == oga.chosen);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(oga.per_step_residual_norm[i] ==
          doctest::Approx(ga.per_step_residual_norm[i]));
  }
}

TEST_CASE("oga exhausts a full span in two steps") {
  Vectord f(2);
  f << 1, 1;
  const PursuitTrace<double> trace =
      oga_decompose<double>(correlated_dict(), f, 2);
  REQUIRE(trace.chosen.size() == 2);
  CHECK(trace.per_step_residual_norm[1] <= 1e-12);
  // Refit coefficients solve the 2x2 system exactly: 5/3 and -1/3.
  CHECK(trace.coefficients[0] == doctest::Approx(5.0 / 3.0));
  CHECK(trace.coefficients[1] == doctest::Approx(-1.0 / 3.0));
}

TEST_CASE("oga terminates early once the span is exhausted") {
  Vectord f(2);
  f << 1, 1;
  const PursuitTrace<double> trace =
      oga_decompose<double>(correlated_dict(), f, 5);
  CHECK(trace.chosen.size() == 2);
}

TEST_CASE("oga residual is orthogonal to every chosen atom") {
  std::mt19937 rng(31);
  for (int rep = 0; rep < 50; ++rep) {
    const Matrixd dict = random_unit_dictionary(10, 15, rng());
    const Vectord f = random_vector(10, rng());
    const PursuitTrace<double> trace = oga_decompose<double>(dict, f, 4);
    Vectord h = f;
    for (std::size_t j = 0; j < trace.chosen.size(); ++j)
      h -= trace.coefficients[static_cast<Index>(j)] *
           dict.col(trace.chosen[j]);
    CHECK(std::abs(h.norm() - trace.per_step_residual_norm.back()) <=
          1e-10 * f.norm());
    for (Index chosen : trace.chosen)
      CHECK(std::abs(h.dot(dict.col(chosen))) <= 1e-10 * f.norm());
  }
}

TEST_CASE("residual norms never increase for either algorithm") {
  std::mt19937 rng(37);
  for (int rep = 0; rep < 50; ++rep) {
    const Matrixd dict = random_unit_dictionary(8, 12, rng());
    const Vectord f = random_vector(8, rng());
    for (const auto& trace : {ga_decompose<double>(dict, f, 5),
                              oga_decompose<double>(dict, f, 5)}) {
      double prev = f.norm();
      for (double r : trace.per_step_residual_norm) {
        CHECK(r <= prev * (1 + 1e-12));
        prev = r;
      }
    }
  }
}

TEST_CASE("oga outperforms ga at step three") {
  // The remainders entering step three (r_1 = h_1 = f, so these are the
  // residuals after two selections) satisfy |h_3| <= |r_3|: both algorithms
  // agree on the first two picks and the orthogonal projection is the
  // nearest point of their span.
  std::mt19937 rng(41);
  for (int rep = 0; rep < 100; ++rep) {
    const Matrixd dict = random_unit_dictionary(12, 20, rng());
    const Vectord f = random_vector(12, rng());
    const PursuitTrace<double> ga = ga_decompose<double>(dict, f, 3);
    const PursuitTrace<double> oga = oga_decompose<double>(dict, f, 3);
    const double h3 = oga.per_step_residual_norm.size() >= 2
                          ? oga.per_step_residual_norm[1]
                          : oga.per_step_residual_norm.back();
    const double r3 = ga.per_step_residual_norm[1];
    CHECK(h3 <= r3 + 1e-12);
  }
}

TEST_CASE("make_dictionary drops zero columns and keeps the index map") {
  Matrixd x = Matrixd::Zero(3, 3);
  x(0, 0) = 2;
  x(1, 2) = -5;
  const Dictionary<double> dict = make_dictionary<double>(x);
  REQUIRE(dict.atoms.cols() == 2);
  CHECK(dict.source_cols == std::vector<Index>{0, 2});
  for (Index j = 0; j < dict.atoms.cols(); ++j)
    CHECK(dict.atoms.col(j).norm() == doctest::Approx(1.0));
}

TEST_CASE("fs_solve refits on the chosen columns") {
  std::mt19937 rng(43);
  const Matrixd x = 3.0 * random_unit_dictionary(20, 6, rng());
  const Vectord y = random_vector(20, rng());
  const LsSolution<double> sol = fs_solve<double>(x, y, 6);
  CHECK(sol.method == "fs");
  // Full-length pursuit on a full-rank matrix is the LS solution.
  const Vectord normal_residual = x.transpose() * (x * sol.w - y);
  CHECK(normal_residual.cwiseAbs().maxCoeff() <= 1e-8 * x.norm() * y.norm());

  // A capped pursuit keeps the residual orthogonal to the used columns.
  const LsSolution<double> capped = fs_solve<double>(x, y, 2);
  CHECK(capped.iterations == 2);
  Index used = 0;
  for (Index j = 0; j < x.cols(); ++j)
    if (capped.w[j] != 0) {
      ++used;
      CHECK(std::abs(x.col(j).dot(x * capped.w - y)) <= 1e-8 * y.norm());
    }
  CHECK(used == 2);
}
