#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "idxgo/curve.hpp"
#include "idxgo/problem.hpp"

namespace idxgo {

struct SolverParams {
  double r = 2.2;       // reliability, > 1
  double xi = 1e-8;     // floor for the Hoelder constant estimates
  double delta = 1e-3;  // stopping tolerance in the Hoelder metric
  int level = 10;       // curve level d, level * N <= 52
  int max_iterations = 5000;  // cap on the number of trials, initial ones included

  // Throws std::invalid_argument when unusable for the given dimension.
  void validate(int dimension) const;
};

enum class StopReason { tolerance, max_iterations, resolution };
std::string to_string(StopReason reason);

// How the per-interval constant M_i is formed.
//   local_tuning: M_i = max(lambda_i, gamma_i, xi)
//   global:       M_i = max(mu_j, xi), one estimate per index over all intervals
enum class EstimateMode { local_tuning, global };

// A trial on [0,1]. Only the raw value g = g_nu(x) is stored; the shifted
// value z is derived from the current record (see SearchState::z).
struct TrialPoint {
  double x;
  int nu;
  double g;
};

struct SearchState {
  int dimension = 1;
  int constraint_count = 0;       // m; nu == m+1 marks a feasible trial
  std::vector<TrialPoint> trials;  // strictly increasing x, contains 0 and 1
  std::vector<double> mu;          // mu_j at [j-1]
  std::vector<double> x_max;       // X^max_j at [j-1]
  std::optional<double> z_star;
  EvalCounters counters;
  int iteration = 0;  // k: number of trials minus one

  int feasible_index() const { return constraint_count + 1; }
  double z(const TrialPoint& t) const;
  double z(std::size_t i) const { return z(trials[i]); }

  // Builds a state from explicit trials (sorted by the call), deriving z*,
  // mu and X^max from scratch. Used for driving the per-step operations
  // directly.
  static SearchState from_trials(int dimension, int constraint_count,
                                 std::vector<TrialPoint> trials);
};

struct IntervalEstimate {
  int i = 0;  // interval [x_{i-1}, x_i], 1-based
  double delta = 0.0;
  double l = 0.0;
  double c = 0.0;
  double r = 0.0;
  double lambda = 0.0;
  double gamma = 0.0;
  double M = 0.0;
  double R = 0.0;
};

struct TrialRecord {
  double x;
  Point y;
  int nu;
  double g;
};

struct SolverResult {
  std::optional<double> best_value;
  std::optional<Point> best_point;
  std::optional<double> best_x;
  EvalCounters counters;
  int iterations = 0;  // k at termination
  StopReason stop_reason = StopReason::max_iterations;
  std::vector<TrialRecord> trial_log;  // evaluation order

  int trial_count() const { return static_cast<int>(trial_log.size()); }
};

// Reported after every placed trial. `state` already includes the new trial.
struct StepInfo {
  int t;              // chosen interval, numbering before insertion
  TrialPoint left;    // endpoints of the subdivided interval
  TrialPoint right;
  TrialPoint added;
  const SearchState& state;
};
using StepObserver = std::function<void(const StepInfo&)>;

struct SolveOptions {
  EstimateMode mode = EstimateMode::local_tuning;
  StepObserver observer;
};

// Per-step operations. Each works on a SearchState from scratch.

// mu_j = max |z_p - z_q| / (x_p - x_q)^(1/N) over all same-index pairs; 0 if none.
std::vector<double> compute_mu(const SearchState& state);
// X^max_j = max Hoelder length over intervals whose larger endpoint index is j.
std::vector<double> compute_x_max(const SearchState& state);

std::vector<IntervalEstimate> compute_interval_estimates(
    const SearchState& state, const SolverParams& params,
    EstimateMode mode = EstimateMode::local_tuning);

double characteristic(const IntervalEstimate& est, const TrialPoint& left,
                      const TrialPoint& right, const SearchState& state, double r);

// 1-based number of the first interval with the largest characteristic.
int select_interval(std::span<const IntervalEstimate> estimates);

// New trial inside [left.x, right.x]. No resolution check.
double next_point(const TrialPoint& left, const TrialPoint& right, double M, int dimension,
                  double r);

// Sufficient reliability value r* = 2^(3-1/N) sqrt(N+3) max L_i / xi.
double compute_r_star(std::span<const double> lipschitz, int dimension, double xi);

// Incremental driver of the index method on one problem.
class IndexSearch {
 public:
  // Performs the two initial trials at x = 0 and x = 1.
  IndexSearch(ConstrainedProblem problem, const SolverParams& params,
              SolveOptions options = {});

  const SearchState& state() const { return state_; }
  const CurveMap& curve() const { return curve_; }
  const SolverParams& params() const { return params_; }
  // Estimates and characteristics of the current intervals.
  const std::vector<IntervalEstimate>& estimates();

  // One iteration: select, test the stopping rule, place a trial. Returns
  // the stop reason instead when the search is over.
  std::optional<StopReason> step();

  SolverResult run();

 private:
  void evaluate_and_insert(double x);
  void refresh();

  ConstrainedProblem problem_;
  SolverParams params_;
  SolveOptions options_;
  CurveMap curve_;
  SearchState state_;
  std::vector<double> deltas_;      // Hoelder length of interval i at [i]; [0] unused
  std::vector<double> mu_power_;    // mu_j^N, pruning threshold for mu updates
  std::vector<IntervalEstimate> estimates_;
  bool estimates_fresh_ = false;
  std::optional<std::size_t> best_log_index_;
  std::vector<TrialRecord> log_;
  std::optional<StopReason> stopped_;
};

SolverResult solve(const ConstrainedProblem& problem, const SolverParams& params,
                   SolveOptions options = {});

namespace detail {
void estimate_intervals(const SearchState& state, std::span<const double> deltas,
                        const SolverParams& params, EstimateMode mode,
                        std::vector<IntervalEstimate>& out);
void estimate_own(const SearchState& state, std::span<const double> deltas, std::size_t i,
                  std::vector<IntervalEstimate>& out);
void estimate_neighbours(const SearchState& state, EstimateMode mode, std::size_t i,
                         std::vector<IntervalEstimate>& out);
void estimate_global(const SearchState& state, const SolverParams& params, EstimateMode mode,
                     std::size_t i, std::vector<IntervalEstimate>& out);
}

}  // namespace idxgo
