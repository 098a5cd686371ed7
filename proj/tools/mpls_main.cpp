// Command-line front end: solve, pinv, bench and compare over CSV files.
//
// Exit codes: 0 success, 2 usage error, 3 input error (missing or malformed
// file, dimension mismatch), 4 numerical failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mpls/bench.hpp"
#include "mpls/csv.hpp"
#include "mpls/errors.hpp"
#include "mpls/greedy.hpp"
#include "mpls/pinv.hpp"
#include "mpls/poafd.hpp"
#include "mpls/solvers.hpp"

namespace {

using namespace mpls;

struct SolveOptions {
  std::string matrix_path;
  std::string rhs_path;
  std::string out_path;
  std::string method = "poafd";
  std::optional<double> tol;
  std::optional<Index> max_select;
  std::optional<double> lambda;
  std::optional<Index> k;
};

struct PinvOptions {
  std::string matrix_path;
  std::string rhs_path;
  std::string out_path;
  std::string method;
  std::string inner = "poafd";
};

struct BenchOptions {
  std::string preset;
  std::uint64_t seed = 1;
  Index trials = 5;
  std::string out_path;
  bool summary = false;
  double scale = 1.0;
  std::optional<double> sigma;
};

struct CompareOptions {
  std::string matrix_path;
  std::string rhs_path;
  std::string methods;
  std::string out_path;
};

std::pair<Matrixd, Vectord> load_problem(const std::string& matrix_path,
                                         const std::string& rhs_path) {
  Matrixd x = read_matrix_csv(matrix_path);
  Vectord y = read_vector_csv(rhs_path);
  if (x.rows() != y.size())
    throw DimensionError(matrix_path + " has " + std::to_string(x.rows()) +
                         " rows but " + rhs_path + " has " +
                         std::to_string(y.size()));
  return {std::move(x), std::move(y)};
}

void run_solve(const SolveOptions& opt) {
  auto [x, y] = load_problem(opt.matrix_path, opt.rhs_path);

  LsSolution<double> sol;
  if (opt.method == "poafd") {
    SolveConfig<double> cfg;
    if (opt.tol) {
      cfg.sel_tol = *opt.tol;
      cfg.zero_col_tol = *opt.tol;
    }
    cfg.max_select = opt.max_select;
    sol = solve_ls(x, y, cfg);
  } else if (opt.method == "lsqr") {
    sol = lsqr(x, y, opt.tol.value_or(1e-10), opt.tol.value_or(1e-10));
  } else if (opt.method == "cgls") {
    sol = cgls(x, y, opt.tol.value_or(1e-10));
  } else if (opt.method == "ridge") {
    const double fallback = 1e-6 * x.squaredNorm() / double(x.cols());
    sol = ridge(x, y, opt.lambda.value_or(fallback));
  } else if (opt.method == "pcr") {
    const Index k = opt.k.value_or(x.cols());
    sol = pcr(x, y, k);
    if (sol.iterations < k)
      std::cerr << "note: k clamped to numerical rank " << sol.iterations
                << '\n';
  } else if (opt.method == "lasso") {
    if (!opt.lambda)
      throw PreconditionError("solve --method lasso requires --lambda");
    sol = lasso_cd(x, y, *opt.lambda, opt.tol.value_or(1e-8));
  } else {
    throw PreconditionError("unknown solve method '" + opt.method + "'");
  }

  write_vector_csv(opt.out_path, sol.w);
  std::printf("method=%s residual=%.17g norm=%.17g steps=%lld\n",
              sol.method.c_str(), sol.residual_norm, sol.solution_norm,
              static_cast<long long>(sol.iterations));
}

void run_pinv(const PinvOptions& opt) {
  auto [x, y] = load_problem(opt.matrix_path, opt.rhs_path);

  const auto inner_solver =
      [&](const Matrixd& a, const Vectord& b) -> LsSolution<double> {
    if (opt.inner == "poafd") return solve_ls<double>(a, b);
    if (opt.inner == "lsqr") return lsqr<double>(a, b);
    if (opt.inner == "cgls") return cgls<double>(a, b);
    throw PreconditionError("unknown inner solver '" + opt.inner + "'");
  };

  PinvResult<double> result;
  if (opt.method == "two-step")
    result = pinv_two_step(x, y, inner_solver);
  else if (opt.method == "one-step")
    result = pinv_one_step(x, y, inner_solver);
  else if (opt.method == "svd")
    result = pinv_svd(x, y);
  else
    throw PreconditionError("unknown pinv method '" + opt.method + "'");

  write_vector_csv(opt.out_path, result.w_dagger);
  Index steps = 0;
  for (const auto& s : result.inner) steps += s.iterations;
  std::printf("method=%s residual=%.17g norm=%.17g steps=%lld\n",
              result.method.c_str(), result.residual_norm,
              result.solution_norm, static_cast<long long>(steps));
}

void run_bench(const BenchOptions& opt) {
  const auto preset = bench::preset_from_string(opt.preset);
  if (!preset || *preset == bench::Preset::custom)
    throw PreconditionError("unknown preset '" + opt.preset + "'");
  bench::ExperimentConfig cfg =
      bench::make_preset(*preset, opt.seed, opt.trials, opt.scale);
  if (opt.sigma) cfg.noise_sigma = *opt.sigma;

  const auto records = bench::run_experiment(cfg);
  bench::emit_records(records, opt.out_path, bench::RecordFormat::csv);
  if (opt.summary) bench::emit_summary(records, std::cout);
}

void run_compare(const CompareOptions& opt) {
  auto [x, y] = load_problem(opt.matrix_path, opt.rhs_path);

  std::vector<std::string> tags;
  std::stringstream ss(opt.methods);
  std::string tag;
  while (std::getline(ss, tag, ','))
    if (!tag.empty()) tags.push_back(tag);
  if (tags.empty()) throw PreconditionError("--methods list is empty");

  std::vector<bench::ExperimentRecord> records;
  for (const auto& t : tags) {
    bench::ExperimentRecord rec;
    rec.preset = "custom";
    rec.method = t;
    rec.m = x.rows();
    rec.n = x.cols();
    try {
      const LsSolution<double> sol = bench::run_method(t, x, y);
      rec.error = sol.residual_norm;
      rec.solution_norm = sol.solution_norm;
      rec.wall_time_s = sol.wall_time_s;
      rec.converged = sol.converged;
    } catch (const NumericalError& e) {
      std::cerr << "note: " << t << " failed: " << e.what() << '\n';
    }
    records.push_back(std::move(rec));
  }
  bench::emit_records(records, opt.out_path, bench::RecordFormat::csv);
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Matching-pursuit least squares and pseudo-inverse toolkit"};
  app.require_subcommand(1);

  SolveOptions solve_opt;
  auto* solve_cmd =
      app.add_subcommand("solve", "Solve a least-squares problem from CSV");
  solve_cmd->add_option("--matrix", solve_opt.matrix_path, "Matrix CSV file")
      ->required();
  solve_cmd->add_option("--rhs", solve_opt.rhs_path, "Right-hand side CSV file")
      ->required();
  solve_cmd->add_option("--out", solve_opt.out_path, "Output CSV for w")
      ->required();
  solve_cmd->add_option("--method", solve_opt.method,
                        "poafd|lsqr|cgls|ridge|pcr|lasso (default poafd)");
  solve_cmd->add_option("--tol", solve_opt.tol, "Solver tolerance");
  solve_cmd->add_option("--max-select", solve_opt.max_select,
                        "Pursuit step cap (poafd)");
  solve_cmd->add_option("--lambda", solve_opt.lambda,
                        "Regularization weight (ridge, lasso)");
  solve_cmd->add_option("--k", solve_opt.k, "Component count (pcr)");

  PinvOptions pinv_opt;
  auto* pinv_cmd =
      app.add_subcommand("pinv", "Minimum-norm least-squares solution");
  pinv_cmd->add_option("--matrix", pinv_opt.matrix_path, "Matrix CSV file")
      ->required();
  pinv_cmd->add_option("--rhs", pinv_opt.rhs_path, "Right-hand side CSV file")
      ->required();
  pinv_cmd->add_option("--out", pinv_opt.out_path, "Output CSV for w")
      ->required();
  pinv_cmd->add_option("--method", pinv_opt.method, "two-step|one-step|svd")
      ->required();
  pinv_cmd->add_option("--inner", pinv_opt.inner,
                       "Inner LS solver: poafd|lsqr|cgls (default poafd)");

  BenchOptions bench_opt;
  auto* bench_cmd =
      app.add_subcommand("bench", "Run a benchmark preset and write records");
  bench_cmd
      ->add_option("--preset", bench_opt.preset,
                   "fig1|fig2|fig3|fig4-tall|fig4-flat")
      ->required();
  bench_cmd->add_option("--seed", bench_opt.seed, "Base seed (default 1)");
  bench_cmd->add_option("--trials", bench_opt.trials,
                        "Trials per method (default 5)");
  bench_cmd->add_option("--out", bench_opt.out_path, "Output records CSV")
      ->required();
  bench_cmd->add_flag("--summary", bench_opt.summary,
                      "Print per-method medians to standard output");
  bench_cmd->add_option("--scale", bench_opt.scale,
                        "Shrink preset dimensions by this factor");
  bench_cmd->add_option("--sigma", bench_opt.sigma,
                        "Override the preset noise level");

  CompareOptions compare_opt;
  auto* compare_cmd =
      app.add_subcommand("compare", "Run several methods on one problem");
  compare_cmd
      ->add_option("--matrix", compare_opt.matrix_path, "Matrix CSV file")
      ->required();
  compare_cmd
      ->add_option("--rhs", compare_opt.rhs_path, "Right-hand side CSV file")
      ->required();
  compare_cmd
      ->add_option("--methods", compare_opt.methods,
                   "Comma-separated method tags")
      ->required();
  compare_cmd->add_option("--out", compare_opt.out_path, "Output records CSV")
      ->required();

  try {
    app.parse(argc, argv);
    if (solve_cmd->parsed()) run_solve(solve_opt);
    if (pinv_cmd->parsed()) run_pinv(pinv_opt);
    if (bench_cmd->parsed()) run_bench(bench_opt);
    if (compare_cmd->parsed()) run_compare(compare_opt);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const CsvError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const DimensionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
  return 0;
}
