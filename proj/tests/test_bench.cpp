#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "mpls/bench.hpp"

using namespace mpls;
using namespace mpls::bench;

TEST_CASE("gen_problem is exact without noise and deterministic") {
  const Problem p = gen_problem(40, 6, 0.0, 7);
  CHECK((p.y - p.x * p.w_true).norm() == 0.0);

  const Problem q = gen_problem(40, 6, 0.0, 7);
  CHECK(p.x == q.x);
  CHECK(p.y == q.y);
  CHECK(p.w_true == q.w_true);

  const Problem other = gen_problem(40, 6, 0.0, 8);
  CHECK(p.x != other.x);

  CHECK_THROWS_AS(gen_problem(0, 3, 0.0, 1), PreconditionError);
  CHECK_THROWS_AS(gen_problem(3, 3, -1.0, 1), PreconditionError);
}

TEST_CASE("gen_problem noise has the requested scale") {
  const Problem p = gen_problem(10000, 1, 0.5, 9);
  const Vectord noise = p.y - p.x * p.w_true;
  const double sample_std =
      std::sqrt(noise.squaredNorm() / double(noise.size()));
  CHECK(sample_std >= 0.48);
  CHECK(sample_std <= 0.52);
}

TEST_CASE("run_experiment record cardinality") {
  ExperimentConfig cfg;
  cfg.m = 20;
  cfg.n = 4;
  cfg.trials = 2;
  cfg.seed = 11;
  cfg.methods = {"poafd"};
  CHECK(run_experiment(cfg).size() == 2);

  cfg.methods = {"poafd", "lsqr"};
  cfg.feature_counts = {1, 2, 3};
  CHECK(run_experiment(cfg).size() == 2 * 2 * 3);
}

TEST_CASE("run_experiment rejects bad configurations") {
  ExperimentConfig cfg;
  cfg.m = 10;
  cfg.n = 3;
  cfg.methods = {"warp-drive"};
  CHECK_THROWS_AS(run_experiment(cfg), PreconditionError);
  cfg.methods = {};
  CHECK_THROWS_AS(run_experiment(cfg), PreconditionError);
}

TEST_CASE("identical configs give identical metrics") {
  ExperimentConfig cfg;
  cfg.m = 30;
  cfg.n = 5;
  cfg.noise_sigma = 0.5;
  cfg.trials = 3;
  cfg.seed = 13;
  cfg.methods = {"poafd", "lsqr", "mp"};

  const auto a = run_experiment(cfg);
  const auto b = run_experiment(cfg);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].error == b[i].error);
    CHECK(a[i].solution_norm == b[i].solution_norm);
    CHECK(a[i].seed == b[i].seed);
  }
}

TEST_CASE("poafd error is non-increasing along the feature sweep") {
  ExperimentConfig cfg;
  cfg.m = 50;
  cfg.n = 8;
  cfg.noise_sigma = 0.5;
  cfg.trials = 3;
  cfg.seed = 17;
  cfg.methods = {"poafd"};
  for (Index k = 1; k <= 8; ++k) cfg.feature_counts.push_back(k);

  const auto records = run_experiment(cfg);
  for (Index trial = 0; trial < cfg.trials; ++trial) {
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& r : records) {
      if (r.trial != trial) continue;
      CHECK(r.error <= prev * (1 + 1e-12));
      prev = r.error;
    }
  }
}

TEST_CASE("more noise means larger errors") {
  ExperimentConfig cfg;
  cfg.m = 60;
  cfg.n = 6;
  cfg.trials = 10;
  cfg.seed = 19;
  cfg.methods = {"poafd"};

  const auto median_error = [&](double sigma) {
    cfg.noise_sigma = sigma;
    std::vector<double> errors;
    for (const auto& r : run_experiment(cfg)) errors.push_back(r.error);
    std::sort(errors.begin(), errors.end());
    return errors[errors.size() / 2];
  };
  CHECK(median_error(5.0) > median_error(0.5));
}

TEST_CASE("a failing method yields an empty-field record and the run continues") {
  ExperimentConfig cfg;
  cfg.m = 4;
  cfg.n = 8; // X^T X is singular, so ridge with lambda = 0 must fail
  cfg.trials = 1;
  cfg.seed = 23;
  cfg.methods = {"ridge", "poafd"};
  cfg.hyperparams["ridge_lambda"] = 0.0;

  const auto records = run_experiment(cfg);
  REQUIRE(records.size() == 2);
  const auto& poafd = records[0];
  const auto& failed = records[1];
  CHECK(poafd.method == "poafd");
  CHECK(poafd.converged);
  CHECK(failed.method == "ridge");
  CHECK_FALSE(failed.converged);
  CHECK(std::isnan(failed.error));

  std::ostringstream out;
  emit_records_csv(records, out);
  // NaN metrics become empty fields so the CSV stays numeric-parseable.
  CHECK(out.str().find(",,") != std::string::npos);
  CHECK(out.str().find("nan") == std::string::npos);
}

TEST_CASE("emit_records_csv writes the exact schema and round-trips") {
  std::ostringstream empty;
  emit_records_csv({}, empty);
  CHECK(empty.str() == std::string(kRecordHeader) + "\n");

  ExperimentRecord rec;
  rec.preset = "custom";
  rec.method = "poafd";
  rec.trial = 3;
  rec.seed = 42;
  rec.m = 10;
  rec.n = 2;
  rec.noise_sigma = 0.5;
  rec.feature_count = 2;
  rec.error = 1.25e-3;
  rec.solution_norm = 2.5;
  rec.wall_time_s = 0.001;
  rec.converged = true;

  std::ostringstream out;
  emit_records_csv({rec}, out);
  std::istringstream in(out.str());
  const auto parsed = parse_records_csv(in);
  REQUIRE(parsed.size() == 1);
  CHECK(parsed[0].preset == rec.preset);
  CHECK(parsed[0].method == rec.method);
  CHECK(parsed[0].trial == rec.trial);
  CHECK(parsed[0].seed == rec.seed);
  CHECK(parsed[0].m == rec.m);
  CHECK(parsed[0].n == rec.n);
  CHECK(parsed[0].noise_sigma == rec.noise_sigma);
  CHECK(parsed[0].feature_count == rec.feature_count);
  CHECK(parsed[0].error == rec.error);
  CHECK(parsed[0].solution_norm == rec.solution_norm);
  CHECK(parsed[0].wall_time_s == rec.wall_time_s);
  CHECK(parsed[0].converged == rec.converged);
}

TEST_CASE("summary lists one row of medians per method") {
  ExperimentConfig cfg;
  cfg.m = 25;
  cfg.n = 4;
  cfg.trials = 3;
  cfg.seed = 29;
  cfg.methods = {"poafd", "lsqr"};

  std::ostringstream out;
  emit_summary(run_experiment(cfg), out);
  const std::string text = out.str();
  CHECK(text.find("method") != std::string::npos);
  CHECK(text.find("poafd") != std::string::npos);
  CHECK(text.find("lsqr") != std::string::npos);
}

TEST_CASE("presets carry the documented shapes") {
  const ExperimentConfig tall = make_preset(Preset::fig4_tall, 1, 2);
  CHECK(tall.m == 3000);
  CHECK(tall.n == 30);
  CHECK(tall.feature_counts.empty());

  const ExperimentConfig flat = make_preset(Preset::fig4_flat, 1, 2);
  CHECK(flat.m == 30);
  CHECK(flat.n == 3000);
  CHECK(flat.noise_sigma == 0.0);

  const ExperimentConfig fig1 = make_preset(Preset::fig1, 1, 2);
  CHECK(fig1.m == 100);
  CHECK(fig1.n == 10);
  CHECK(fig1.feature_counts.size() == 10);

  const ExperimentConfig scaled = make_preset(Preset::fig2, 1, 2, 0.1);
  CHECK(scaled.m == 100);
  CHECK(scaled.n == 1);
}

TEST_CASE("sweep-aware methods honor the feature budget") {
  const Problem p = gen_problem(40, 8, 0.5, 31);
  for (const char* tag : {"poafd", "fs", "pcr"}) {
    const LsSolution<double> sol = run_method(tag, p.x, p.y, {}, 3);
    CHECK(sol.iterations <= 3);
  }
  const LsSolution<double> lasso = run_method("lasso", p.x, p.y, {}, 3);
  CHECK(lasso.converged);
}
