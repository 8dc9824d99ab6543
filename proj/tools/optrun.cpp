// optrun: runs the index solvers on the built-in test problems.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "idxgo/harness.hpp"

namespace {

struct Options {
  std::string problem;
  std::optional<int> dim;
  std::string method = "local-tuning";
  idxgo::SolverParams params;
  std::uint64_t seed = 1;
  std::string output = "csv";
  std::string dump_trials;
  std::optional<int> experiment;
  std::vector<double> r_values{2.5, 3.0};
  bool with_penalty = false;
  bool timing = false;
  int workers = 1;
};

int run_single(const Options& opt) {
  idxgo::RunSpec spec;
  spec.problem = opt.problem;
  spec.dimension = opt.dim;
  spec.method = idxgo::parse_method(opt.method);
  spec.params = opt.params;

  idxgo::SolverResult result;
  const idxgo::RunRecord rec = idxgo::run_one(spec, &result);
  if (!opt.dump_trials.empty()) idxgo::dump_trials(result, opt.dump_trials);

  const idxgo::OutputOptions out{opt.timing};
  if (opt.output == "json") idxgo::write_json(std::cout, {rec}, out);
  else idxgo::write_csv(std::cout, {rec}, out);
  return 0;
}

int run_experiment(const Options& opt) {
  const idxgo::OutputOptions out{opt.timing};
  switch (*opt.experiment) {
    case 1: {
      idxgo::ExperimentConfig config = idxgo::experiment1(opt.params.delta, opt.with_penalty);
      config.workers = opt.workers;
      const auto records = idxgo::run(config);
      const auto speedups = idxgo::experiment1_speedups(records);
      if (opt.output == "json") {
        idxgo::write_json(std::cout, records, out);
      } else {
        idxgo::write_csv(std::cout, records, out);
        std::cout << '\n';
        idxgo::write_speedups_csv(std::cout, speedups);
      }
      return 0;
    }
    case 2: {
      idxgo::Experiment2Options e2;
      e2.seed = opt.seed;
      e2.r_values = opt.r_values;
      e2.delta = opt.params.delta;
      e2.base = opt.params;
      e2.workers = opt.workers;
      const auto table = idxgo::experiment2(e2);
      if (opt.output == "json") idxgo::write_experiment2_json(std::cout, table);
      else idxgo::write_experiment2_csv(std::cout, table);
      return 0;
    }
    case 3: {
      idxgo::ExperimentConfig config = idxgo::experiment3();
      config.workers = opt.workers;
      const auto records = idxgo::run(config);
      if (opt.output == "json") idxgo::write_json(std::cout, records, out);
      else idxgo::write_csv(std::cout, records, out);
      return 0;
    }
  }
  throw idxgo::ConfigError("unknown experiment");
}

}  // namespace

int main(int argc, char** argv) {
  Options opt;
  CLI::App app{"Constrained global optimization with the index scheme and local tuning"};
  app.add_option("--problem", opt.problem, "Test problem")
      ->check(CLI::IsMember({"P1", "P2", "P3", "P4", "P5"}));
  app.add_option("--dim", opt.dim, "Dimension (P5 only)");
  app.add_option("--method", opt.method, "Solver")
      ->check(CLI::IsMember({"local-tuning", "strongin-markin", "penalty"}))
      ->capture_default_str();
  app.add_option("--r", opt.params.r, "Reliability parameter")->capture_default_str();
  app.add_option("--delta", opt.params.delta, "Stopping tolerance")->capture_default_str();
  app.add_option("--xi", opt.params.xi, "Floor for the Hoelder estimates")->capture_default_str();
  app.add_option("--level", opt.params.level, "Curve level d")->capture_default_str();
  app.add_option("--max-iters", opt.params.max_iterations, "Trial cap")->capture_default_str();
  app.add_option("--seed", opt.seed, "Seed for experiment 2")->capture_default_str();
  app.add_option("--output", opt.output, "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  app.add_option("--dump-trials", opt.dump_trials, "Write the trial log CSV to this path");
  app.add_option("--experiment", opt.experiment, "Run a preset")->check(CLI::Range(1, 3));
  app.add_option("--r-values", opt.r_values, "Reliability values for experiment 2")
      ->capture_default_str();
  app.add_flag("--with-penalty", opt.with_penalty, "Add penalty runs to experiment 1");
  app.add_flag("--timing", opt.timing, "Report wall time");
  app.add_option("--workers", opt.workers, "Worker threads for presets")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (opt.experiment) {
      if (!opt.problem.empty())
        throw idxgo::ConfigError("--problem and --experiment are mutually exclusive");
      return run_experiment(opt);
    }
    if (opt.problem.empty()) throw idxgo::ConfigError("--problem or --experiment is required");
    return run_single(opt);
  } catch (const idxgo::ConfigError& e) {
    std::cerr << "optrun: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "optrun: " << e.what() << '\n';
    return 1;
  }
}
