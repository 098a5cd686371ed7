#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mpls/csv.hpp"
#include "mpls/errors.hpp"
#include "mpls/greedy.hpp"
#include "mpls/pinv.hpp"
#include "mpls/poafd.hpp"
#include "mpls/solvers.hpp"
#include "mpls/types.hpp"

namespace mpls::bench {

enum class Preset { fig1, fig2, fig3, fig4_tall, fig4_flat, custom };

inline std::string to_string(Preset p) {
  switch (p) {
    case Preset::fig1: return "fig1";
    case Preset::fig2: return "fig2";
    case Preset::fig3: return "fig3";
    case Preset::fig4_tall: return "fig4-tall";
    case Preset::fig4_flat: return "fig4-flat";
    case Preset::custom: return "custom";
  }
  return "custom";
}

inline std::optional<Preset> preset_from_string(const std::string& s) {
  if (s == "fig1") return Preset::fig1;
  if (s == "fig2") return Preset::fig2;
  if (s == "fig3") return Preset::fig3;
  if (s == "fig4-tall") return Preset::fig4_tall;
  if (s == "fig4-flat") return Preset::fig4_flat;
  if (s == "custom") return Preset::custom;
  return std::nullopt;
}

/// One harness run: problem shape, noise level, trial count, base seed, the
/// methods to compare, and an optional feature-count sweep.
struct ExperimentConfig {
  Preset preset = Preset::custom;
  Index m = 0;
  Index n = 0;
  double noise_sigma = 0.0;
  Index trials = 1;
  std::uint64_t seed = 0;
  std::vector<std::string> methods;
  std::vector<Index> feature_counts; // empty: no sweep, each method runs full
  std::map<std::string, double> hyperparams;
};

/// One (method, trial, feature_count) measurement row. error is the residual
/// norm |Xw - y| on the noisy y; NaN marks a failed solve and is written as
/// an empty CSV field.
struct ExperimentRecord {
  std::string preset;
  std::string method;
  Index trial = 0;
  std::uint64_t seed = 0;
  Index m = 0;
  Index n = 0;
  double noise_sigma = 0.0;
  std::optional<Index> feature_count{};
  double error = std::numeric_limits<double>::quiet_NaN();
  double solution_norm = std::numeric_limits<double>::quiet_NaN();
  double wall_time_s = std::numeric_limits<double>::quiet_NaN();
  bool converged = false;
};

struct Problem {
  Matrixd x;
  Vectord y;
  Vectord w_true;
};

/// Synthetic problem: X and w_true have i.i.d. standard normal entries and
/// y = X w_true + sigma * (standard normal noise). Deterministic in
/// (m, n, sigma, seed); the draw order is X column by column, then w_true,
/// then the noise.
inline Problem gen_problem(Index m, Index n, double sigma, std::uint64_t seed) {
  if (m < 1 || n < 1) throw PreconditionError("gen_problem: m, n must be >= 1");
  if (sigma < 0) throw PreconditionError("gen_problem: sigma must be >= 0");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  Problem p;
  p.x.resize(m, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < m; ++i) p.x(i, j) = gauss(rng);
  p.w_true.resize(n);
  for (Index i = 0; i < n; ++i) p.w_true[i] = gauss(rng);
  p.y = p.x * p.w_true;
  if (sigma > 0)
    for (Index i = 0; i < m; ++i) p.y[i] += sigma * gauss(rng);
  return p;
}

inline const std::vector<std::string>& known_methods() {
  static const std::vector<std::string> tags = {
      "poafd", "lsqr", "cgls",     "ridge",   "pcr",
      "lasso", "fs",   "mp",       "two_step", "one_step"};
  return tags;
}

namespace detail {

inline double hyper(const std::map<std::string, double>& hp,
                    const std::string& key, double fallback) {
  auto it = hp.find(key);
  return it == hp.end() ? fallback : it->second;
}

inline std::vector<double> lasso_grid(const Matrixd& x, const Vectord& y,
                                      int points = 10) {
  double lmax = (x.transpose() * y).cwiseAbs().maxCoeff();
  if (!(lmax > 0)) lmax = 1.0;
  std::vector<double> grid;
  for (int i = 0; i < points; ++i)
    grid.push_back(lmax * std::pow(10.0, -4.0 * i / (points - 1)));
  return grid;
}

// Pick the grid lambda whose support size is closest to the target count
// (larger lambda wins ties) and return that fit.
inline LsSolution<double> lasso_at_support(const Matrixd& x, const Vectord& y,
                                           Index target) {
  std::optional<LsSolution<double>> best;
  Index best_gap = std::numeric_limits<Index>::max();
  for (double lambda : lasso_grid(x, y)) {
    LsSolution<double> fit = lasso_cd(x, y, lambda);
    const Index support = (fit.w.array() != 0.0).count();
    const Index gap = std::abs(support - target);
    if (gap < best_gap) {
      best_gap = gap;
      best = std::move(fit);
    }
  }
  return *best;
}

// Fixed-grid hold-out selection: fit each lambda on the first 80% of rows,
// score on the rest, refit the winner on everything.
inline LsSolution<double> lasso_holdout(const Matrixd& x, const Vectord& y) {
  const std::vector<double> grid = lasso_grid(x, y);
  const Index m = x.rows();
  if (m < 5) return lasso_cd(x, y, grid[grid.size() / 2]);

  const Index m_tr = std::max<Index>(1, (4 * m) / 5);
  const Matrixd x_tr = x.topRows(m_tr);
  const Vectord y_tr = y.head(m_tr);
  const Matrixd x_va = x.bottomRows(m - m_tr);
  const Vectord y_va = y.tail(m - m_tr);

  double best_lambda = grid.front();
  double best_score = std::numeric_limits<double>::infinity();
  for (double lambda : grid) {
    const LsSolution<double> fit = lasso_cd(x_tr, y_tr, lambda);
    const double score = (x_va * fit.w - y_va).norm();
    if (score < best_score) {
      best_score = score;
      best_lambda = lambda;
    }
  }
  return lasso_cd(x, y, best_lambda);
}

template <typename Scalar>
LsSolution<Scalar> from_pinv(std::string tag, const DenseMatrix<Scalar>& x,
                             const DenseVector<Scalar>& y,
                             PinvResult<Scalar> r) {
  Index iters = 0;
  bool converged = true;
  for (const auto& s : r.inner) {
    iters += s.iterations;
    converged = converged && s.converged;
  }
  return make_solution(std::move(tag), x, y, std::move(r.w_dagger), iters,
                       converged);
}

} // namespace detail

/// Run one method tag on one problem. features caps the pursuit length /
/// component count for the sweep-capable methods and is ignored by the rest.
inline LsSolution<double> run_method(const std::string& tag, const Matrixd& x,
                                     const Vectord& y,
                                     const std::map<std::string, double>& hp = {},
                                     std::optional<Index> features = {}) {
  if (tag == "poafd") {
    SolveConfig<double> cfg;
    cfg.max_select = features;
    return solve_ls(x, y, cfg);
  }
  if (tag == "lsqr")
    return lsqr(x, y, detail::hyper(hp, "lsqr_atol", 1e-10),
                detail::hyper(hp, "lsqr_btol", 1e-10));
  if (tag == "cgls") return cgls(x, y, detail::hyper(hp, "cgls_tol", 1e-10));
  if (tag == "ridge") {
    const double fallback =
        1e-6 * x.squaredNorm() / static_cast<double>(x.cols());
    return ridge(x, y, detail::hyper(hp, "ridge_lambda", fallback));
  }
  if (tag == "pcr") return pcr(x, y, features.value_or(x.cols()));
  if (tag == "lasso") {
    auto it = hp.find("lasso_lambda");
    if (it != hp.end()) return lasso_cd(x, y, it->second);
    return features ? detail::lasso_at_support(x, y, *features)
                    : detail::lasso_holdout(x, y);
  }
  if (tag == "fs") return fs_solve(x, y, features.value_or(x.cols()));
  if (tag == "mp") return detail::from_pinv("mp", x, y, pinv_svd(x, y));
  if (tag == "two_step")
    return detail::from_pinv("two_step", x, y, pinv_two_step(x, y));
  if (tag == "one_step")
    return detail::from_pinv("one_step", x, y, pinv_one_step(x, y));
  throw PreconditionError("run_method: unknown method tag '" + tag + "'");
}

/// Paper-scale preset configurations; scale shrinks both dimensions for
/// quick runs.
inline ExperimentConfig make_preset(Preset preset, std::uint64_t seed,
                                    Index trials, double scale = 1.0) {
  if (scale <= 0) throw PreconditionError("make_preset: scale must be > 0");
  ExperimentConfig cfg;
  cfg.preset = preset;
  cfg.seed = seed;
  cfg.trials = trials;
  const auto scaled = [scale](Index v) {
    return std::max<Index>(1, static_cast<Index>(std::lround(v * scale)));
  };
  switch (preset) {
    case Preset::fig1:
    case Preset::fig3:
      cfg.m = scaled(100);
      cfg.n = scaled(10);
      cfg.noise_sigma = 0.5;
      cfg.methods = {"lasso", "fs", "pcr", "poafd"};
      break;
    case Preset::fig2:
      cfg.m = scaled(1000);
      cfg.n = scaled(10);
      cfg.noise_sigma = 0.5;
      cfg.methods = {"lasso", "fs", "pcr", "poafd"};
      break;
    case Preset::fig4_tall:
      cfg.m = scaled(3000);
      cfg.n = scaled(30);
      cfg.noise_sigma = 1.0;
      cfg.methods = {"lsqr", "cgls", "ridge", "mp", "two_step", "one_step"};
      break;
    case Preset::fig4_flat:
      cfg.m = scaled(30);
      cfg.n = scaled(3000);
      cfg.noise_sigma = 0.0;
      cfg.methods = {"lsqr", "cgls", "ridge", "mp", "two_step", "one_step"};
      break;
    case Preset::custom:
      break;
  }
  if (preset == Preset::fig1 || preset == Preset::fig2 ||
      preset == Preset::fig3)
    for (Index k = 1; k <= cfg.n; ++k) cfg.feature_counts.push_back(k);
  return cfg;
}

/// Run every (method, trial, feature_count) combination. A failing solve
/// yields a converged=false record with NaN metrics and the run continues.
/// Records come back sorted by (preset, method, trial, feature_count).
inline std::vector<ExperimentRecord> run_experiment(
    const ExperimentConfig& cfg) {
  if (cfg.trials < 1)
    throw PreconditionError("run_experiment: trials must be >= 1");
  if (cfg.m < 1 || cfg.n < 1)
    throw PreconditionError("run_experiment: m, n must be >= 1");
  if (cfg.methods.empty())
    throw PreconditionError("run_experiment: no methods configured");
  for (const auto& tag : cfg.methods)
    if (std::find(known_methods().begin(), known_methods().end(), tag) ==
        known_methods().end())
      throw PreconditionError("run_experiment: unknown method tag '" + tag +
                              "'");

  std::vector<std::optional<Index>> sweep;
  if (cfg.feature_counts.empty()) {
    sweep.push_back(std::nullopt);
  } else {
    for (Index k : cfg.feature_counts) sweep.push_back(k);
  }

  std::vector<ExperimentRecord> records;
  for (Index trial = 0; trial < cfg.trials; ++trial) {
    const std::uint64_t trial_seed = cfg.seed + static_cast<std::uint64_t>(trial);
    const Problem problem = gen_problem(cfg.m, cfg.n, cfg.noise_sigma,
                                        trial_seed);
    for (const auto& tag : cfg.methods) {
      for (const auto& features : sweep) {
        ExperimentRecord rec;
        rec.preset = to_string(cfg.preset);
        rec.method = tag;
        rec.trial = trial;
        rec.seed = trial_seed;
        rec.m = cfg.m;
        rec.n = cfg.n;
        rec.noise_sigma = cfg.noise_sigma;
        rec.feature_count = features;
        try {
          // Timing is the median of three repeats of the solve call only.
          std::array<double, 3> times{};
          LsSolution<double> sol;
          for (int rep = 0; rep < 3; ++rep) {
            const auto t0 = std::chrono::steady_clock::now();
            LsSolution<double> run =
                run_method(tag, problem.x, problem.y, cfg.hyperparams,
                           features);
            times[static_cast<std::size_t>(rep)] =
                std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
            if (rep == 0) sol = std::move(run);
          }
          std::sort(times.begin(), times.end());
          rec.error = sol.residual_norm;
          rec.solution_norm = sol.solution_norm;
          rec.wall_time_s = times[1];
          rec.converged = sol.converged;
        } catch (const std::exception&) {
          rec.converged = false; // metrics stay NaN
        }
        records.push_back(std::move(rec));
      }
    }
  }

  std::sort(records.begin(), records.end(),
            [](const ExperimentRecord& a, const ExperimentRecord& b) {
              if (a.preset != b.preset) return a.preset < b.preset;
              if (a.method != b.method) return a.method < b.method;
              if (a.trial != b.trial) return a.trial < b.trial;
              const Index fa = a.feature_count.value_or(-1);
              const Index fb = b.feature_count.value_or(-1);
              return fa < fb;
            });
  return records;
}

inline constexpr const char* kRecordHeader =
    "preset,method,trial,seed,m,n,noise_sigma,feature_count,error,"
    "solution_norm,wall_time_s,converged";

namespace detail {

inline std::string real_field(double v) {
  return std::isnan(v) ? std::string() : mpls::detail::format_17g(v);
}

} // namespace detail

inline void emit_records_csv(const std::vector<ExperimentRecord>& records,
                             std::ostream& out) {
  out << kRecordHeader << '\n';
  for (const auto& r : records) {
    out << r.preset << ',' << r.method << ',' << r.trial << ',' << r.seed
        << ',' << r.m << ',' << r.n << ',' << detail::real_field(r.noise_sigma)
        << ',';
    if (r.feature_count) out << *r.feature_count;
    out << ',' << detail::real_field(r.error) << ','
        << detail::real_field(r.solution_norm) << ','
        << detail::real_field(r.wall_time_s) << ',' << (r.converged ? 1 : 0)
        << '\n';
  }
}

/// Per-method medians in the shape of the comparison tables:
/// method, time, error, solution norm.
inline void emit_summary(const std::vector<ExperimentRecord>& records,
                         std::ostream& out) {
  const auto median = [](std::vector<double> values) {
    std::erase_if(values, [](double v) { return std::isnan(v); });
    if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    return values.size() % 2 == 1 ? values[mid]
                                  : 0.5 * (values[mid - 1] + values[mid]);
  };

  std::vector<std::string> order;
  std::map<std::string, std::array<std::vector<double>, 3>> by_method;
  for (const auto& r : records) {
    if (by_method.find(r.method) == by_method.end()) order.push_back(r.method);
    auto& cols = by_method[r.method];
    cols[0].push_back(r.wall_time_s);
    cols[1].push_back(r.error);
    cols[2].push_back(r.solution_norm);
  }

  char line[128];
  std::snprintf(line, sizeof(line), "%-10s %14s %14s %14s\n", "method",
                "time_s", "error", "norm");
  out << line;
  for (const auto& tag : order) {
    const auto& cols = by_method[tag];
    std::snprintf(line, sizeof(line), "%-10s %14.6g %14.6g %14.6g\n",
                  tag.c_str(), median(cols[0]), median(cols[1]),
                  median(cols[2]));
    out << line;
  }
}

enum class RecordFormat { csv, summary };

inline void emit_records(const std::vector<ExperimentRecord>& records,
                         const std::filesystem::path& path,
                         RecordFormat format) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw CsvError(path.string() + ": cannot open for writing");
  if (format == RecordFormat::csv)
    emit_records_csv(records, out);
  else
    emit_summary(records, out);
  if (!out) throw CsvError(path.string() + ": write failed");
}

/// Parse a record CSV written by emit_records_csv (used for round-trip
/// checks and schema validation).
inline std::vector<ExperimentRecord> parse_records_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw CsvError("records: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kRecordHeader)
    throw CsvError("records:1:1: unexpected header '" + line + "'");

  std::vector<ExperimentRecord> records;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
      const std::size_t comma = line.find(',', start);
      fields.push_back(line.substr(
          start, comma == std::string::npos ? std::string::npos
                                            : comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (fields.size() != 12)
      throw CsvError("records:" + std::to_string(lineno) +
                     ":1: expected 12 fields, got " +
                     std::to_string(fields.size()));
    const auto real_or_nan = [&](const std::string& f) {
      return f.empty() ? std::numeric_limits<double>::quiet_NaN()
                       : std::stod(f);
    };
    ExperimentRecord r;
    r.preset = fields[0];
    r.method = fields[1];
    r.trial = std::stoll(fields[2]);
    r.seed = std::stoull(fields[3]);
    r.m = std::stoll(fields[4]);
    r.n = std::stoll(fields[5]);
    r.noise_sigma = real_or_nan(fields[6]);
    if (!fields[7].empty()) r.feature_count = std::stoll(fields[7]);
    r.error = real_or_nan(fields[8]);
    r.solution_norm = real_or_nan(fields[9]);
    r.wall_time_s = real_or_nan(fields[10]);
    r.converged = fields[11] == "1";
    records.push_back(std::move(r));
  }
  return records;
}

} // namespace mpls::bench
