#pragma once

#include "idxgo/problem.hpp"
#include "idxgo/solver.hpp"

namespace idxgo {

// Index method with one global estimate per index (no local tuning). Shares
// the whole pipeline with solve(); only the M_i formula differs.
SolverResult solve_strongin_markin(const ConstrainedProblem& problem, const SolverParams& params,
                                   StepObserver observer = {});

// phi_P(y) = phi(y) + p * max{G_1(y), ..., G_m(y), 0} as an m = 0 problem.
// Requires every function to be defined over the whole box.
ConstrainedProblem penalized_objective(const ConstrainedProblem& problem, double p);

struct PenaltyParams {
  double initial_p = 0.1;
  double increment = 0.1;
  double feasibility_tolerance = 0.0;
  int max_attempts = 100;
  EstimateMode inner_mode = EstimateMode::global;
  SolverParams inner;
};

struct PenaltyResult {
  SolverResult result;  // last attempt; counters summed over all attempts
  double p_star = 0.0;
  int attempts = 0;
};

class PenaltySearchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Solves the penalized problem for p = initial_p, initial_p + increment, ...
// until the returned point satisfies every original constraint. Counters are
// in units of original functions: each penalized evaluation calls all m
// constraints and the objective once.
PenaltyResult solve_penalty(const ConstrainedProblem& problem, const PenaltyParams& params,
                            StepObserver observer = {});

}  // namespace idxgo
