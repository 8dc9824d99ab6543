#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "idxgo/curve.hpp"

namespace idxgo {

using Function = std::function<double(std::span<const double>)>;

struct KnownSolution {
  Point minimizer;
  double value;
};

// Objective and ordered constraints over a box. Constraint i is only
// computable where constraints 1..i-1 hold (G <= 0), and the objective only
// where all of them hold.
struct ConstrainedProblem {
  std::string name;
  Box domain;
  std::vector<Function> constraints;
  Function objective;
  std::optional<KnownSolution> known_solution;
  std::vector<double> known_lipschitz;  // L_1..L_{m+1}, empty when unknown

  int dimension() const { return domain.dimension(); }
  int constraint_count() const { return static_cast<int>(constraints.size()); }
};

// Index of the first violated constraint (1-based), or m+1 when feasible,
// paired with the value of that function.
struct IndexedValue {
  int index;
  double value;
};

struct EvalCounters {
  std::vector<std::int64_t> constraint;  // n_1..n_m
  std::int64_t objective = 0;

  EvalCounters() = default;
  explicit EvalCounters(int m) : constraint(m, 0) {}

  std::int64_t total() const;
  EvalCounters& operator+=(const EvalCounters& other);
};

class EvaluationError : public std::runtime_error {
 public:
  // function_index is 1-based; m+1 denotes the objective.
  EvaluationError(const std::string& what, int function_index)
      : std::runtime_error(what), function_index_(function_index) {}
  int function_index() const { return function_index_; }

 private:
  int function_index_;
};

// Index scheme: G_1, G_2, ... in order, stopping at the first G_i > 0.
// G_i == 0 counts as satisfied. Only the functions actually called are counted.
IndexedValue evaluate_indexed(const ConstrainedProblem& problem, std::span<const double> y,
                              EvalCounters& counters);

// Test problems P1..P5; dimension is required for (and only used by) P5.
ConstrainedProblem get_problem(const std::string& name, std::optional<int> dimension = {});
std::vector<std::string> problem_names();

// Problem 2 with a fixed annulus center.
ConstrainedProblem annulus_problem(double center_y1, double center_y2);

// `count` copies of Problem 2 with the center shifted by i.i.d. uniform(-1,1)
// offsets from a seeded mt19937_64 stream.
std::vector<ConstrainedProblem> perturbed_annulus(std::uint64_t seed, int count);

struct GridSolution {
  Point minimizer;
  double value;
};

// Brute-force oracle: best feasible point of the uniform grid with
// points_per_axis nodes per axis (including the box corners). Empty when no
// grid point is feasible.
std::optional<GridSolution> grid_reference_solution(const ConstrainedProblem& problem,
                                                    int points_per_axis);

}  // namespace idxgo
