#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "idxgo/solver.hpp"

namespace idxgo::testing_support {

// Reference driver assembled from the per-step operations only. When
// `global_m` is set, M_i is replaced by max(mu_j, xi) before the
// characteristics are formed.
inline std::vector<double> reference_trials(const ConstrainedProblem& problem,
                                            const SolverParams& params, bool global_m) {
  const int n = problem.dimension();
  const int m = problem.constraint_count();
  const CurveMap curve(n, params.level);
  EvalCounters counters(m);
  std::vector<double> order;
  SearchState st;
  st.dimension = n;
  st.constraint_count = m;
  st.mu.assign(m + 1, 0.0);

  auto add = [&](double x) {
    const IndexedValue v =
        evaluate_indexed(problem, scale_to_domain(curve.evolvent(x), problem.domain), counters);
    const TrialPoint t{x, v.index, v.value};
    for (const auto& q : st.trials) {
      if (q.nu != t.nu) continue;
      st.mu[t.nu - 1] = std::max(st.mu[t.nu - 1], std::abs(t.g - q.g) / holder_distance(t.x, q.x, n));
    }
    if (t.nu == m + 1 && (!st.z_star || t.g < *st.z_star)) st.z_star = t.g;
    auto it = std::lower_bound(st.trials.begin(), st.trials.end(), x,
                               [](const TrialPoint& a, double b) { return a.x < b; });
    st.trials.insert(it, t);
    st.x_max = compute_x_max(st);
    order.push_back(x);
  };

  add(0.0);
  add(1.0);
  while (static_cast<int>(order.size()) < params.max_iterations) {
    auto est = compute_interval_estimates(st, params, EstimateMode::local_tuning);
    for (std::size_t i = 0; i < est.size(); ++i) {
      if (global_m) {
        const int j = std::max(st.trials[i].nu, st.trials[i + 1].nu);
        est[i].M = std::max(st.mu[j - 1], params.xi);
      }
      est[i].R = characteristic(est[i], st.trials[i], st.trials[i + 1], st, params.r);
    }
    const int t = select_interval(est);
    if (est[t - 1].delta <= params.delta) break;
    const double x = next_point(st.trials[t - 1], st.trials[t], est[t - 1].M, n, params.r);
    if (!(x - st.trials[t - 1].x > std::ldexp(1.0, -52) && st.trials[t].x - x > std::ldexp(1.0, -52)))
      break;
    add(x);
  }
  return order;
}

}  // namespace idxgo::testing_support
