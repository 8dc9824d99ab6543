#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "idxgo/baselines.hpp"
#include "idxgo/problem.hpp"
#include "idxgo/solver.hpp"

namespace idxgo {

enum class Method { local_tuning, strongin_markin, penalty };
std::string to_string(Method method);
// Accepts the CLI spellings: local-tuning, strongin-markin, penalty.
Method parse_method(const std::string& name);

// Bad experiment configuration (unknown problem, invalid parameters, ...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RunSpec {
  std::string problem;
  std::optional<int> dimension;  // P5 only
  Method method = Method::local_tuning;
  SolverParams params;
  // Penalty schedule; `params` is used for the inner solver.
  double penalty_initial = 0.1;
  double penalty_increment = 0.1;
  int penalty_max_attempts = 100;
};

struct RunRecord {
  RunSpec spec;
  int dimension = 0;
  std::vector<std::int64_t> n_constraint;
  std::int64_t n_objective = 0;
  int iterations = 0;
  int trials = 0;
  std::optional<double> phi_c;
  std::optional<Point> y_c;
  StopReason stop_reason = StopReason::max_iterations;
  double wall_time = 0.0;  // seconds
  std::optional<double> p_star;  // penalty runs
  std::optional<int> attempts;

  std::int64_t total_evaluations() const;
};

struct ExperimentConfig {
  std::vector<RunSpec> runs;
  int workers = 1;
};

// Checks a cell without running it. Throws ConfigError.
void validate(const RunSpec& spec);

// Runs one cell. The full solver result is copied to `result` when given.
RunRecord run_one(const RunSpec& spec, SolverResult* result = nullptr);

// Runs every cell, possibly on `workers` threads. Records come back in
// config order.
std::vector<RunRecord> run(const ExperimentConfig& config);

// Experiment presets.
//   1: P1..P4 with both index methods at `delta` (8 cells), plus penalty
//      cells when include_penalty is set.
//   3: P5 for N = 2..6 at the published (r, delta) pairs; d = 8 for N = 6.
// Experiment 2 has its own entry point.
ExperimentConfig experiment1(double delta, bool include_penalty = false);
ExperimentConfig experiment3();

struct SpeedupReport {
  double s1 = 0.0;  // n_1 ratio
  double s2 = 0.0;  // n_phi ratio
  double s3 = 0.0;  // ratio of all evaluations
};

// baseline / candidate ratios; > 1 means the candidate is cheaper.
// Throws std::invalid_argument on a problem mismatch or zero denominator.
SpeedupReport speedup(const RunRecord& baseline, const RunRecord& candidate);

struct Experiment2Row {
  double r = 0.0;
  Method method = Method::local_tuning;
  int successes = 0;
  int count = 0;
  double n1_average = 0.0;
  double n2_average = 0.0;
  double nphi_average = 0.0;
  std::vector<bool> solved;  // per problem
  std::vector<double> phi;   // best value per problem (NaN when none)
};

struct Experiment2Options {
  std::uint64_t seed = 1;
  std::vector<double> r_values{2.5, 3.0};
  int count = 20;
  double delta = 1e-3;
  int grid_points = 1000;
  double success_tolerance = 0.05;
  int workers = 1;
  SolverParams base;  // r and delta are overridden
};

struct Experiment2Table {
  std::vector<double> grid_optimum;  // per problem
  std::vector<Experiment2Row> rows;  // for each r: local tuning, then Strongin-Markin
};

Experiment2Table experiment2(const Experiment2Options& options);

// Speedups of local tuning over Strongin-Markin from average counters.
SpeedupReport speedup(const Experiment2Row& baseline, const Experiment2Row& candidate);

// `%.17g`, the serialization used by every writer below.
std::string format_real(double value);

struct OutputOptions {
  bool timing = false;  // include wall_time
};

void write_csv(std::ostream& out, const std::vector<RunRecord>& records,
               const OutputOptions& options = {});
void write_json(std::ostream& out, const std::vector<RunRecord>& records,
                const OutputOptions& options = {});

// Speedups S1, S2, S3 for every (problem, params) present with both
// index methods.
struct SpeedupRow {
  std::string problem;
  double delta = 0.0;
  SpeedupReport report;
};
std::vector<SpeedupRow> experiment1_speedups(const std::vector<RunRecord>& records);
void write_speedups_csv(std::ostream& out, const std::vector<SpeedupRow>& rows);

void write_experiment2_csv(std::ostream& out, const Experiment2Table& table);
void write_experiment2_json(std::ostream& out, const Experiment2Table& table);

// CSV `k,x,y1,...,yN,index,value`, one row per trial in evaluation order.
// Throws std::invalid_argument on an empty log, std::runtime_error on I/O
// failure.
void dump_trials(const SolverResult& result, const std::filesystem::path& path);
void write_trials(std::ostream& out, const SolverResult& result);

}  // namespace idxgo
