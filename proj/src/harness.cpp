#include "idxgo/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace idxgo {
namespace {

using Clock = std::chrono::steady_clock;

// Runs job(i) for i in [0, n) on up to `workers` threads. The first exception
// is rethrown after all threads have joined.
template <class Job>
void parallel_for(std::size_t n, int workers, Job job) {
  const std::size_t threads = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(workers, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          job(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string csv_optional(const std::optional<double>& v) { return v ? format_real(*v) : ""; }

nlohmann::json json_optional(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

double ratio(double num, double den, const char* what) {
  if (den == 0.0) throw std::invalid_argument(std::string("speedup: zero ") + what + " in candidate");
  if (num == 0.0) throw std::invalid_argument(std::string("speedup: zero ") + what + " in baseline");
  return num / den;
}

}  // namespace

std::string to_string(Method method) {
  switch (method) {
    case Method::local_tuning: return "local-tuning";
    case Method::strongin_markin: return "strongin-markin";
    case Method::penalty: return "penalty";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  if (name == "local-tuning") return Method::local_tuning;
  if (name == "strongin-markin") return Method::strongin_markin;
  if (name == "penalty") return Method::penalty;
  throw ConfigError("unknown method '" + name +
                    "' (expected local-tuning, strongin-markin or penalty)");
}

std::int64_t RunRecord::total_evaluations() const {
  std::int64_t total = n_objective;
  for (auto n : n_constraint) total += n;
  return total;
}

void validate(const RunSpec& spec) {
  try {
    const ConstrainedProblem problem = get_problem(spec.problem, spec.dimension);
    spec.params.validate(problem.dimension());
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (spec.method == Method::penalty) {
    if (!(spec.penalty_initial > 0.0) || !(spec.penalty_increment > 0.0))
      throw ConfigError("penalty coefficients must be positive");
    if (spec.penalty_max_attempts < 1) throw ConfigError("penalty attempts must be >= 1");
  }
}

RunRecord run_one(const RunSpec& spec, SolverResult* result) {
  validate(spec);
  const ConstrainedProblem problem = get_problem(spec.problem, spec.dimension);

  RunRecord rec;
  rec.spec = spec;
  rec.dimension = problem.dimension();

  const auto start = Clock::now();
  SolverResult res;
  switch (spec.method) {
    case Method::local_tuning:
      res = solve(problem, spec.params, SolveOptions{EstimateMode::local_tuning, {}});
      break;
    case Method::strongin_markin:
      res = solve_strongin_markin(problem, spec.params);
      break;
    case Method::penalty: {
      PenaltyParams pp;
      pp.initial_p = spec.penalty_initial;
      pp.increment = spec.penalty_increment;
      pp.max_attempts = spec.penalty_max_attempts;
      pp.inner = spec.params;
      PenaltyResult pr = solve_penalty(problem, pp);
      res = std::move(pr.result);
      rec.p_star = pr.p_star;
      rec.attempts = pr.attempts;
      break;
    }
  }
  rec.wall_time = seconds_since(start);

  rec.n_constraint = res.counters.constraint;
  rec.n_objective = res.counters.objective;
  rec.iterations = res.iterations;
  rec.trials = res.trial_count();
  rec.phi_c = res.best_value;
  rec.y_c = res.best_point;
  rec.stop_reason = res.stop_reason;
  if (result) *result = std::move(res);
  return rec;
}

std::vector<RunRecord> run(const ExperimentConfig& config) {
  for (const auto& spec : config.runs) validate(spec);
  std::vector<RunRecord> records(config.runs.size());
  parallel_for(config.runs.size(), config.workers,
               [&](std::size_t i) { records[i] = run_one(config.runs[i]); });
  return records;
}

ExperimentConfig experiment1(double delta, bool include_penalty) {
  ExperimentConfig config;
  for (const char* name : {"P1", "P2", "P3", "P4"}) {
    RunSpec spec;
    spec.problem = name;
    spec.params.delta = delta;
    spec.method = Method::strongin_markin;
    config.runs.push_back(spec);
    spec.method = Method::local_tuning;
    config.runs.push_back(spec);
    if (include_penalty) {
      spec.method = Method::penalty;
      config.runs.push_back(spec);
    }
  }
  return config;
}

ExperimentConfig experiment3() {
  struct Row {
    int n;
    double r;
    double delta;
  };
  const Row rows[] = {{2, 2.35, 1e-3}, {2, 2.35, 1e-4}, {3, 2.45, 1e-3}, {3, 2.45, 1e-4},
                      {4, 2.7, 1e-3},  {4, 2.7, 1e-4},  {5, 3.3, 1e-3},  {5, 3.3, 1e-4},
                      {6, 3.35, 1e-3}, {6, 3.35, 1e-4}, {6, 3.35, 5e-5}};
  ExperimentConfig config;
  for (Method method : {Method::local_tuning, Method::strongin_markin}) {
    for (const Row& row : rows) {
      RunSpec spec;
      spec.problem = "P5";
      spec.dimension = row.n;
      spec.method = method;
      spec.params.r = row.r;
      spec.params.delta = row.delta;
      spec.params.level = row.n == 6 ? 8 : 10;
      spec.params.max_iterations = 40000;
      config.runs.push_back(spec);
    }
  }
  return config;
}

SpeedupReport speedup(const RunRecord& baseline, const RunRecord& candidate) {
  if (baseline.spec.problem != candidate.spec.problem || baseline.dimension != candidate.dimension)
    throw std::invalid_argument("speedup: records belong to different problems");
  const double b1 = baseline.n_constraint.empty() ? baseline.n_objective : baseline.n_constraint[0];
  const double c1 =
      candidate.n_constraint.empty() ? candidate.n_objective : candidate.n_constraint[0];
  SpeedupReport out;
  out.s1 = ratio(b1, c1, "n_1");
  out.s2 = ratio(baseline.n_objective, candidate.n_objective, "n_phi");
  out.s3 = ratio(baseline.total_evaluations(), candidate.total_evaluations(), "evaluation total");
  return out;
}

SpeedupReport speedup(const Experiment2Row& baseline, const Experiment2Row& candidate) {
  SpeedupReport out;
  out.s1 = ratio(baseline.n1_average, candidate.n1_average, "n_1");
  out.s2 = ratio(baseline.nphi_average, candidate.nphi_average, "n_phi");
  out.s3 = ratio(baseline.n1_average + baseline.n2_average + baseline.nphi_average,
                 candidate.n1_average + candidate.n2_average + candidate.nphi_average,
                 "evaluation total");
  return out;
}

Experiment2Table experiment2(const Experiment2Options& options) {
  if (options.count < 1) throw ConfigError("experiment 2: count must be >= 1");
  if (options.grid_points < 2) throw ConfigError("experiment 2: grid needs >= 2 points per axis");
  const std::vector<ConstrainedProblem> problems = perturbed_annulus(options.seed, options.count);

  Experiment2Table table;
  table.grid_optimum.resize(problems.size());
  parallel_for(problems.size(), options.workers, [&](std::size_t i) {
    const auto grid = grid_reference_solution(problems[i], options.grid_points);
    table.grid_optimum[i] =
        grid ? grid->value : std::numeric_limits<double>::quiet_NaN();
  });

  const Method methods[] = {Method::local_tuning, Method::strongin_markin};
  struct Cell {
    std::size_t row;
    std::size_t problem;
  };
  std::vector<Cell> cells;
  for (double r : options.r_values) {
    for (Method method : methods) {
      Experiment2Row row;
      row.r = r;
      row.method = method;
      row.count = options.count;
      row.solved.assign(problems.size(), false);
      row.phi.assign(problems.size(), std::numeric_limits<double>::quiet_NaN());
      table.rows.push_back(std::move(row));
      for (std::size_t p = 0; p < problems.size(); ++p) cells.push_back({table.rows.size() - 1, p});
    }
  }

  std::vector<EvalCounters> counters(cells.size());
  parallel_for(cells.size(), options.workers, [&](std::size_t c) {
    Experiment2Row& row = table.rows[cells[c].row];
    const std::size_t p = cells[c].problem;
    SolverParams params = options.base;
    params.r = row.r;
    params.delta = options.delta;
    const EstimateMode mode =
        row.method == Method::local_tuning ? EstimateMode::local_tuning : EstimateMode::global;
    const SolverResult res = solve(problems[p], params, SolveOptions{mode, {}});
    counters[c] = res.counters;
    if (res.best_value) row.phi[p] = *res.best_value;
  });

  for (std::size_t c = 0; c < cells.size(); ++c) {
    Experiment2Row& row = table.rows[cells[c].row];
    const std::size_t p = cells[c].problem;
    // NaN (no feasible trial or no feasible grid node) never counts.
    row.solved[p] = std::abs(row.phi[p] - table.grid_optimum[p]) <= options.success_tolerance;
    row.n1_average += static_cast<double>(counters[c].constraint[0]);
    row.n2_average += static_cast<double>(counters[c].constraint[1]);
    row.nphi_average += static_cast<double>(counters[c].objective);
  }
  for (auto& row : table.rows) {
    row.successes = static_cast<int>(std::count(row.solved.begin(), row.solved.end(), true));
    row.n1_average /= row.count;
    row.n2_average /= row.count;
    row.nphi_average /= row.count;
  }
  return table;
}

std::string format_real(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_csv(std::ostream& out, const std::vector<RunRecord>& records,
               const OutputOptions& options) {
  std::size_t m = 0;
  int n = 0;
  for (const auto& rec : records) {
    m = std::max(m, rec.n_constraint.size());
    n = std::max(n, rec.dimension);
  }
  out << "problem,dim,method,r,delta,xi,level,max_iters";
  for (std::size_t j = 1; j <= m; ++j) out << ",n" << j;
  out << ",n_phi,iterations,trials,phi_c";
  for (int j = 1; j <= n; ++j) out << ",y" << j;
  out << ",stop_reason,p_star,attempts";
  if (options.timing) out << ",wall_time";
  out << '\n';

  for (const auto& rec : records) {
    const SolverParams& p = rec.spec.params;
    out << rec.spec.problem << ',' << rec.dimension << ',' << to_string(rec.spec.method) << ','
        << format_real(p.r) << ',' << format_real(p.delta) << ',' << format_real(p.xi) << ','
        << p.level << ',' << p.max_iterations;
    for (std::size_t j = 0; j < m; ++j) {
      out << ',';
      if (j < rec.n_constraint.size()) out << rec.n_constraint[j];
    }
    out << ',' << rec.n_objective << ',' << rec.iterations << ',' << rec.trials << ','
        << csv_optional(rec.phi_c);
    for (int j = 0; j < n; ++j) {
      out << ',';
      if (rec.y_c && j < rec.dimension) out << format_real((*rec.y_c)[j]);
    }
    out << ',' << to_string(rec.stop_reason) << ',' << csv_optional(rec.p_star) << ',';
    if (rec.attempts) out << *rec.attempts;
    if (options.timing) out << ',' << format_real(rec.wall_time);
    out << '\n';
  }
}

namespace {

nlohmann::json record_json(const RunRecord& rec, const OutputOptions& options) {
  const SolverParams& p = rec.spec.params;
  nlohmann::json j;
  j["problem"] = rec.spec.problem;
  j["dim"] = rec.dimension;
  j["method"] = to_string(rec.spec.method);
  j["params"] = {{"r", p.r},         {"delta", p.delta},
                 {"xi", p.xi},       {"level", p.level},
                 {"max_iters", p.max_iterations}};
  j["n_constraint"] = rec.n_constraint;
  j["n_phi"] = rec.n_objective;
  j["iterations"] = rec.iterations;
  j["trials"] = rec.trials;
  j["phi_c"] = json_optional(rec.phi_c);
  j["y_c"] = rec.y_c ? nlohmann::json(*rec.y_c) : nlohmann::json(nullptr);
  j["stop_reason"] = to_string(rec.stop_reason);
  if (rec.spec.method == Method::penalty) {
    j["p_star"] = json_optional(rec.p_star);
    j["attempts"] = rec.attempts ? nlohmann::json(*rec.attempts) : nlohmann::json(nullptr);
  }
  if (options.timing) j["wall_time"] = rec.wall_time;
  return j;
}

}  // namespace

void write_json(std::ostream& out, const std::vector<RunRecord>& records,
                const OutputOptions& options) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& rec : records) arr.push_back(record_json(rec, options));
  // nlohmann serializes doubles with the shortest round-trip form.
  out << arr.dump(2) << '\n';
}

std::vector<SpeedupRow> experiment1_speedups(const std::vector<RunRecord>& records) {
  std::vector<SpeedupRow> rows;
  auto same_cell = [](const RunRecord& a, const RunRecord& b) {
    const SolverParams& p = a.spec.params;
    const SolverParams& q = b.spec.params;
    return a.spec.problem == b.spec.problem && a.dimension == b.dimension && p.r == q.r &&
           p.delta == q.delta && p.xi == q.xi && p.level == q.level &&
           p.max_iterations == q.max_iterations;
  };
  for (const auto& base : records) {
    if (base.spec.method != Method::strongin_markin) continue;
    for (const auto& cand : records) {
      if (cand.spec.method != Method::local_tuning || !same_cell(base, cand)) continue;
      rows.push_back({base.spec.problem, base.spec.params.delta, speedup(base, cand)});
      break;
    }
  }
  return rows;
}

void write_speedups_csv(std::ostream& out, const std::vector<SpeedupRow>& rows) {
  out << "problem,delta,s1,s2,s3\n";
  for (const auto& row : rows) {
    out << row.problem << ',' << format_real(row.delta) << ',' << format_real(row.report.s1) << ','
        << format_real(row.report.s2) << ',' << format_real(row.report.s3) << '\n';
  }
}

namespace {

// Local tuning row paired with the Strongin-Markin row of the same r.
const Experiment2Row* baseline_for(const Experiment2Table& table, const Experiment2Row& row) {
  if (row.method != Method::local_tuning) return nullptr;
  for (const auto& other : table.rows)
    if (other.method == Method::strongin_markin && other.r == row.r) return &other;
  return nullptr;
}

}  // namespace

void write_experiment2_csv(std::ostream& out, const Experiment2Table& table) {
  out << "r,method,successes,count,n1_average,n2_average,nphi_average,s1,s2,s3\n";
  for (const auto& row : table.rows) {
    out << format_real(row.r) << ',' << to_string(row.method) << ',' << row.successes << ','
        << row.count << ',' << format_real(row.n1_average) << ',' << format_real(row.n2_average)
        << ',' << format_real(row.nphi_average);
    if (const Experiment2Row* base = baseline_for(table, row)) {
      const SpeedupReport s = speedup(*base, row);
      out << ',' << format_real(s.s1) << ',' << format_real(s.s2) << ',' << format_real(s.s3);
    } else {
      out << ",,,";
    }
    out << '\n';
  }
}

void write_experiment2_json(std::ostream& out, const Experiment2Table& table) {
  nlohmann::json j;
  j["grid_optimum"] = table.grid_optimum;
  j["rows"] = nlohmann::json::array();
  for (const auto& row : table.rows) {
    nlohmann::json r;
    r["r"] = row.r;
    r["method"] = to_string(row.method);
    r["successes"] = row.successes;
    r["count"] = row.count;
    r["n1_average"] = row.n1_average;
    r["n2_average"] = row.n2_average;
    r["nphi_average"] = row.nphi_average;
    r["solved"] = row.solved;
    nlohmann::json phi = nlohmann::json::array();
    for (double v : row.phi) phi.push_back(std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v));
    r["phi"] = phi;
    if (const Experiment2Row* base = baseline_for(table, row)) {
      const SpeedupReport s = speedup(*base, row);
      r["speedup"] = {{"s1", s.s1}, {"s2", s.s2}, {"s3", s.s3}};
    }
    j["rows"].push_back(r);
  }
  out << j.dump(2) << '\n';
}

void write_trials(std::ostream& out, const SolverResult& result) {
  if (result.trial_log.empty()) throw std::invalid_argument("dump_trials: empty trial log");
  const std::size_t n = result.trial_log.front().y.size();
  out << "k,x";
  for (std::size_t j = 1; j <= n; ++j) out << ",y" << j;
  out << ",index,value\n";
  for (std::size_t k = 0; k < result.trial_log.size(); ++k) {
    const TrialRecord& t = result.trial_log[k];
    out << k << ',' << format_real(t.x);
    for (double v : t.y) out << ',' << format_real(v);
    out << ',' << t.nu << ',' << format_real(t.g) << '\n';
  }
}

void dump_trials(const SolverResult& result, const std::filesystem::path& path) {
  if (result.trial_log.empty()) throw std::invalid_argument("dump_trials: empty trial log");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("dump_trials: cannot open " + path.string());
  write_trials(out, result);
  out.flush();
  if (!out) throw std::runtime_error("dump_trials: write failed for " + path.string());
}

}  // namespace idxgo
