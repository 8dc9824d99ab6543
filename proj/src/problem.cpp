#include "idxgo/problem.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace idxgo {

std::int64_t EvalCounters::total() const {
  std::int64_t sum = objective;
  for (auto n : constraint) sum += n;
  return sum;
}

EvalCounters& EvalCounters::operator+=(const EvalCounters& other) {
  if (constraint.size() < other.constraint.size()) constraint.resize(other.constraint.size(), 0);
  for (std::size_t i = 0; i < other.constraint.size(); ++i) constraint[i] += other.constraint[i];
  objective += other.objective;
  return *this;
}

IndexedValue evaluate_indexed(const ConstrainedProblem& problem, std::span<const double> y,
                              EvalCounters& counters) {
  if (!problem.domain.contains(y))
    throw std::out_of_range("evaluate_indexed: point outside the search domain of " + problem.name);
  const int m = problem.constraint_count();
  if (static_cast<int>(counters.constraint.size()) != m)
    throw std::invalid_argument("evaluate_indexed: counters sized for a different problem");

  auto check = [&](double v, int index) {
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg << problem.name << ": non-finite value of function " << index;
      throw EvaluationError(msg.str(), index);
    }
    return v;
  };

  for (int i = 0; i < m; ++i) {
    ++counters.constraint[i];
    const double g = check(problem.constraints[i](y), i + 1);
    if (g > 0.0) return {i + 1, g};
  }
  ++counters.objective;
  return {m + 1, check(problem.objective(y), m + 1)};
}

std::optional<GridSolution> grid_reference_solution(const ConstrainedProblem& problem,
                                                    int points_per_axis) {
  if (points_per_axis < 2)
    throw std::invalid_argument("grid_reference_solution: need at least 2 points per axis");
  const int n = problem.dimension();
  const int m = problem.constraint_count();
  const auto& lo = problem.domain.lower();
  const auto& hi = problem.domain.upper();

  std::vector<std::vector<double>> axes(n);
  for (int j = 0; j < n; ++j) {
    axes[j].resize(points_per_axis);
    for (int s = 0; s < points_per_axis; ++s)
      axes[j][s] = lo[j] + (hi[j] - lo[j]) * s / (points_per_axis - 1);
    axes[j].back() = hi[j];
  }

  std::optional<GridSolution> best;
  EvalCounters counters(m);
  std::vector<int> idx(n, 0);
  Point y(n);
  for (;;) {
    for (int j = 0; j < n; ++j) y[j] = axes[j][idx[j]];
    const IndexedValue v = evaluate_indexed(problem, y, counters);
    if (v.index == m + 1 && (!best || v.value < best->value)) best = GridSolution{y, v.value};

    int j = 0;
    while (j < n && ++idx[j] == points_per_axis) idx[j++] = 0;
    if (j == n) break;
  }
  return best;
}

}  // namespace idxgo
