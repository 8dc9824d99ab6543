#include "idxgo/baselines.hpp"

#include <algorithm>
#include <sstream>

namespace idxgo {

SolverResult solve_strongin_markin(const ConstrainedProblem& problem, const SolverParams& params,
                                   StepObserver observer) {
  return solve(problem, params, SolveOptions{EstimateMode::global, std::move(observer)});
}

ConstrainedProblem penalized_objective(const ConstrainedProblem& problem, double p) {
  ConstrainedProblem out{problem.name, problem.domain, {}, {}, {}, {}};
  out.objective = [constraints = problem.constraints, objective = problem.objective,
                   p](std::span<const double> y) {
    double worst = 0.0;
    for (const auto& g : constraints) worst = std::max(worst, g(y));
    return objective(y) + p * worst;
  };
  return out;
}

PenaltyResult solve_penalty(const ConstrainedProblem& problem, const PenaltyParams& params,
                            StepObserver observer) {
  if (!(params.initial_p > 0.0) || !(params.increment > 0.0))
    throw std::invalid_argument("PenaltyParams: coefficients must be positive");
  const int m = problem.constraint_count();

  EvalCounters total(m);
  for (int attempt = 0; attempt < params.max_attempts; ++attempt) {
    const double p = params.initial_p + attempt * params.increment;
    SolverResult res = solve(penalized_objective(problem, p), params.inner,
                             SolveOptions{params.inner_mode, observer});

    const std::int64_t calls = res.counters.objective;
    for (auto& n : total.constraint) n += calls;
    total.objective += calls;

    bool feasible = res.best_point.has_value();
    if (feasible) {
      for (const auto& g : problem.constraints) {
        if (g(*res.best_point) > params.feasibility_tolerance) {
          feasible = false;
          break;
        }
      }
    }
    if (feasible) {
      res.counters = total;
      // phi_P differs from phi only by the penalty of tolerated violations.
      if (params.feasibility_tolerance > 0.0) res.best_value = problem.objective(*res.best_point);
      return PenaltyResult{std::move(res), p, attempt + 1};
    }
  }
  std::ostringstream msg;
  msg << problem.name << ": no feasible penalized solution after " << params.max_attempts
      << " coefficient increments";
  throw PenaltySearchError(msg.str());
}

}  // namespace idxgo
