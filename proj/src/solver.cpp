#include "idxgo/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace idxgo {
namespace {

double ipow(double base, int n) {
  double out = 1.0;
  for (int i = 0; i < n; ++i) out *= base;
  return out;
}

// Quotients that can only tie the current maximum up to rounding are
// evaluated exactly; the margin keeps pruning from dropping a true maximum.
constexpr double kPruneMargin = 1.0 - 1e-12;

// The evolvent separates any two points of [0,1] that double precision
// separates, so a new trial only has to stay clear of its neighbours by 2^-52.
const double kPlacementGap = std::ldexp(1.0, -CurveMap::kMaxBits);

}  // namespace

void SolverParams::validate(int dimension) const {
  std::ostringstream msg;
  if (!(r > 1.0)) msg << "reliability r must exceed 1 (got " << r << ")";
  else if (!(xi > 0.0)) msg << "xi must be positive (got " << xi << ")";
  else if (!(delta > 0.0)) msg << "delta must be positive (got " << delta << ")";
  else if (level < 1) msg << "curve level must be >= 1 (got " << level << ")";
  else if (dimension > 1 && level * dimension > CurveMap::kMaxBits)
    msg << "level*dimension = " << level * dimension << " exceeds " << CurveMap::kMaxBits;
  else if (max_iterations < 2) msg << "max_iterations must be >= 2 (got " << max_iterations << ")";
  else return;
  throw std::invalid_argument("SolverParams: " + msg.str());
}

std::string to_string(StopReason reason) {
  switch (reason) {
    case StopReason::tolerance: return "tolerance";
    case StopReason::max_iterations: return "max_iterations";
    case StopReason::resolution: return "resolution";
  }
  return "unknown";
}

double SearchState::z(const TrialPoint& t) const {
  if (t.nu == feasible_index()) return t.g - *z_star;
  return t.g;
}

SearchState SearchState::from_trials(int dimension, int constraint_count,
                                     std::vector<TrialPoint> trials) {
  std::sort(trials.begin(), trials.end(),
            [](const TrialPoint& a, const TrialPoint& b) { return a.x < b.x; });
  for (std::size_t i = 1; i < trials.size(); ++i)
    if (!(trials[i - 1].x < trials[i].x))
      throw std::invalid_argument("SearchState: trial points must be distinct");

  SearchState s;
  s.dimension = dimension;
  s.constraint_count = constraint_count;
  s.trials = std::move(trials);
  s.counters = EvalCounters(constraint_count);
  s.iteration = static_cast<int>(s.trials.size()) - 1;
  for (const auto& t : s.trials) {
    if (t.nu < 1 || t.nu > s.feasible_index())
      throw std::invalid_argument("SearchState: trial index out of range");
    if (t.nu == s.feasible_index() && (!s.z_star || t.g < *s.z_star)) s.z_star = t.g;
  }
  s.mu = compute_mu(s);
  s.x_max = compute_x_max(s);
  return s;
}

std::vector<double> compute_mu(const SearchState& state) {
  std::vector<double> mu(state.feasible_index(), 0.0);
  const auto& tr = state.trials;
  for (std::size_t p = 1; p < tr.size(); ++p) {
    for (std::size_t q = 0; q < p; ++q) {
      if (tr[p].nu != tr[q].nu) continue;
      // The shift by z* cancels for equal indices.
      const double quotient =
          std::abs(tr[p].g - tr[q].g) / holder_distance(tr[p].x, tr[q].x, state.dimension);
      double& m = mu[tr[p].nu - 1];
      m = std::max(m, quotient);
    }
  }
  return mu;
}

std::vector<double> compute_x_max(const SearchState& state) {
  std::vector<double> x_max(state.feasible_index(), 0.0);
  const auto& tr = state.trials;
  for (std::size_t i = 1; i < tr.size(); ++i) {
    const int j = std::max(tr[i].nu, tr[i - 1].nu);
    x_max[j - 1] = std::max(x_max[j - 1], holder_distance(tr[i].x, tr[i - 1].x, state.dimension));
  }
  return x_max;
}

double characteristic(const IntervalEstimate& est, const TrialPoint& left,
                      const TrialPoint& right, const SearchState& state, double r) {
  const double rm = r * est.M;
  const double d = est.delta;
  if (left.nu == right.nu) {
    const double diff = right.g - left.g;
    return d + diff * diff / (rm * rm * d) - 2.0 * (state.z(right) + state.z(left)) / rm;
  }
  if (right.nu > left.nu) return 2.0 * d - 4.0 * state.z(right) / rm;
  return 2.0 * d - 4.0 * state.z(left) / rm;
}

int select_interval(std::span<const IntervalEstimate> estimates) {
  if (estimates.empty()) throw std::invalid_argument("select_interval: no intervals");
  std::size_t best = 0;
  for (std::size_t i = 1; i < estimates.size(); ++i)
    if (estimates[i].R > estimates[best].R) best = i;
  return static_cast<int>(best) + 1;
}

double next_point(const TrialPoint& left, const TrialPoint& right, double M, int dimension,
                  double r) {
  const double mid = 0.5 * (left.x + right.x);
  if (left.nu != right.nu) return mid;
  const double diff = right.g - left.g;
  if (diff == 0.0) return mid;
  const double shift = ipow(std::abs(diff) / M, dimension) / (2.0 * r);
  return diff > 0.0 ? mid - shift : mid + shift;
}

double compute_r_star(std::span<const double> lipschitz, int dimension, double xi) {
  if (lipschitz.empty()) throw std::invalid_argument("compute_r_star: no Lipschitz constants");
  if (dimension < 2) throw std::invalid_argument("compute_r_star: dimension must be >= 2");
  if (!(xi > 0.0)) throw std::invalid_argument("compute_r_star: xi must be positive");
  double max_l = 0.0;
  for (double l : lipschitz) {
    if (!(l > 0.0)) throw std::invalid_argument("compute_r_star: constants must be positive");
    max_l = std::max(max_l, l);
  }
  return std::pow(2.0, 3.0 - 1.0 / dimension) * std::sqrt(dimension + 3.0) * max_l / xi;
}

namespace detail {

// Interval i (1-based) lives at out[i-1]. Each stage reads only what the
// earlier stages wrote, so a partial refresh matches a full one bit for bit.
void estimate_own(const SearchState& state, std::span<const double> deltas, std::size_t i,
                  std::vector<IntervalEstimate>& out) {
  const auto& tr = state.trials;
  IntervalEstimate& e = out[i - 1];
  e = IntervalEstimate{};
  e.i = static_cast<int>(i);
  e.delta = deltas[i];
  if (tr[i].nu == tr[i - 1].nu) e.c = std::abs(tr[i].g - tr[i - 1].g) / e.delta;
}

void estimate_neighbours(const SearchState& state, EstimateMode mode, std::size_t i,
                         std::vector<IntervalEstimate>& out) {
  const auto& tr = state.trials;
  const std::size_t k = tr.size() - 1;
  IntervalEstimate& e = out[i - 1];
  // c_{i-1} already carries the nu_{i-2} == nu_{i-1} guard, c_{i+1} the
  // nu_{i+1} == nu_i one.
  e.l = i >= 2 && tr[i - 1].nu >= tr[i].nu ? out[i - 2].c : 0.0;
  e.r = i + 1 <= k && tr[i].nu >= tr[i - 1].nu ? out[i].c : 0.0;
  if (mode == EstimateMode::local_tuning) e.lambda = std::max({e.l, e.c, e.r});
}

void estimate_global(const SearchState& state, const SolverParams& params, EstimateMode mode,
                     std::size_t i, std::vector<IntervalEstimate>& out) {
  const auto& tr = state.trials;
  IntervalEstimate& e = out[i - 1];
  const int j = std::max(tr[i].nu, tr[i - 1].nu);
  const double mu = state.mu[j - 1];
  if (mode == EstimateMode::global) {
    e.lambda = mu;
    e.gamma = mu;
  } else {
    const double xm = state.x_max[j - 1];
    e.gamma = xm > 0.0 ? mu * e.delta / xm : 0.0;
  }
  e.M = std::max({e.lambda, e.gamma, params.xi});
  e.R = characteristic(e, tr[i - 1], tr[i], state, params.r);
}

void estimate_intervals(const SearchState& state, std::span<const double> deltas,
                        const SolverParams& params, EstimateMode mode,
                        std::vector<IntervalEstimate>& out) {
  const std::size_t k = state.trials.size() - 1;
  out.resize(k);
  for (std::size_t i = 1; i <= k; ++i) estimate_own(state, deltas, i, out);
  for (std::size_t i = 1; i <= k; ++i) estimate_neighbours(state, mode, i, out);
  for (std::size_t i = 1; i <= k; ++i) estimate_global(state, params, mode, i, out);
}

}  // namespace detail

std::vector<IntervalEstimate> compute_interval_estimates(const SearchState& state,
                                                         const SolverParams& params,
                                                         EstimateMode mode) {
  if (state.trials.size() < 2)
    throw std::invalid_argument("compute_interval_estimates: need at least two trials");
  std::vector<double> deltas(state.trials.size(), 0.0);
  for (std::size_t i = 1; i < state.trials.size(); ++i)
    deltas[i] = holder_distance(state.trials[i].x, state.trials[i - 1].x, state.dimension);
  std::vector<IntervalEstimate> out;
  detail::estimate_intervals(state, deltas, params, mode, out);
  return out;
}

IndexSearch::IndexSearch(ConstrainedProblem problem, const SolverParams& params,
                         SolveOptions options)
    : problem_(std::move(problem)),
      params_(params),
      options_(std::move(options)),
      curve_((params.validate(problem_.dimension()), problem_.dimension()), params.level) {
  const int m = problem_.constraint_count();
  state_.dimension = problem_.dimension();
  state_.constraint_count = m;
  state_.counters = EvalCounters(m);
  state_.mu.assign(m + 1, 0.0);
  state_.x_max.assign(m + 1, 0.0);
  mu_power_.assign(m + 1, 0.0);

  evaluate_and_insert(0.0);
  evaluate_and_insert(1.0);
  state_.iteration = 1;
}

void IndexSearch::evaluate_and_insert(double x) {
  const std::vector<double> mu_before = state_.mu;
  const std::vector<double> x_max_before = state_.x_max;
  const std::optional<double> z_before = state_.z_star;

  Point y = scale_to_domain(curve_.evolvent(x), problem_.domain);
  const IndexedValue v = evaluate_indexed(problem_, y, state_.counters);
  const TrialPoint added{x, v.index, v.value};
  log_.push_back({x, std::move(y), v.index, v.value});

  auto& tr = state_.trials;
  const int n = state_.dimension;
  const auto pos = static_cast<std::size_t>(
      std::lower_bound(tr.begin(), tr.end(), x,
                       [](const TrialPoint& t, double value) { return t.x < value; }) -
      tr.begin());
  tr.insert(tr.begin() + static_cast<std::ptrdiff_t>(pos), added);
  deltas_.insert(deltas_.begin() + static_cast<std::ptrdiff_t>(pos), 0.0);
  if (pos >= 1) deltas_[pos] = holder_distance(tr[pos].x, tr[pos - 1].x, n);
  if (pos + 1 < tr.size()) deltas_[pos + 1] = holder_distance(tr[pos + 1].x, tr[pos].x, n);

  // mu over all same-index pairs, pruning pairs that cannot raise it.
  const int j = v.index;
  double& mu = state_.mu[j - 1];
  double& threshold = mu_power_[j - 1];
  for (std::size_t q = 0; q < tr.size(); ++q) {
    if (q == pos || tr[q].nu != j) continue;
    const double dg = std::abs(added.g - tr[q].g);
    const double dx = std::abs(added.x - tr[q].x);
    if (ipow(dg, n) <= threshold * dx * kPruneMargin) continue;
    const double quotient = dg / holder_distance(added.x, tr[q].x, n);
    if (quotient > mu) {
      mu = quotient;
      threshold = ipow(mu, n);
    }
  }

  if (j == state_.feasible_index() && (!state_.z_star || v.value < *state_.z_star)) {
    state_.z_star = v.value;
    best_log_index_ = log_.size() - 1;
  }

  std::fill(state_.x_max.begin(), state_.x_max.end(), 0.0);
  for (std::size_t i = 1; i < tr.size(); ++i) {
    const int jj = std::max(tr[i].nu, tr[i - 1].nu);
    state_.x_max[jj - 1] = std::max(state_.x_max[jj - 1], deltas_[i]);
  }

  // Interval pos was split into pos and pos + 1; below that only the
  // neighbours' l and r move unless mu, X^max or z* changed.
  const std::size_t k = tr.size() - 1;
  if (!estimates_fresh_ || estimates_.size() + 1 != k || pos == 0 || pos == k) {
    estimates_fresh_ = false;
    return;
  }
  estimates_.insert(estimates_.begin() + static_cast<std::ptrdiff_t>(pos), IntervalEstimate{});
  for (std::size_t i = pos + 2; i <= k; ++i) estimates_[i - 1].i = static_cast<int>(i);
  const std::size_t lo = pos > 1 ? pos - 1 : 1;
  const std::size_t hi = std::min(pos + 2, k);
  detail::estimate_own(state_, deltas_, pos, estimates_);
  detail::estimate_own(state_, deltas_, pos + 1, estimates_);
  for (std::size_t i = lo; i <= hi; ++i)
    detail::estimate_neighbours(state_, options_.mode, i, estimates_);
  const bool global_change =
      state_.mu != mu_before || state_.x_max != x_max_before || state_.z_star != z_before;
  const std::size_t from = global_change ? 1 : lo;
  const std::size_t to = global_change ? k : hi;
  for (std::size_t i = from; i <= to; ++i)
    detail::estimate_global(state_, params_, options_.mode, i, estimates_);
}

void IndexSearch::refresh() {
  if (estimates_fresh_) return;
  detail::estimate_intervals(state_, deltas_, params_, options_.mode, estimates_);
  estimates_fresh_ = true;
}

const std::vector<IntervalEstimate>& IndexSearch::estimates() {
  refresh();
  return estimates_;
}

std::optional<StopReason> IndexSearch::step() {
  if (stopped_) return stopped_;
  refresh();

  const int t = select_interval(estimates_);
  const IntervalEstimate& est = estimates_[t - 1];
  if (est.delta <= params_.delta) return stopped_ = StopReason::tolerance;
  if (static_cast<int>(state_.trials.size()) >= params_.max_iterations)
    return stopped_ = StopReason::max_iterations;

  const TrialPoint left = state_.trials[t - 1];
  const TrialPoint right = state_.trials[t];
  const double x = next_point(left, right, est.M, state_.dimension, params_.r);
  if (!(x - left.x > kPlacementGap && right.x - x > kPlacementGap))
    return stopped_ = StopReason::resolution;

  evaluate_and_insert(x);
  ++state_.iteration;
  if (options_.observer) {
    const TrialPoint added{x, log_.back().nu, log_.back().g};
    options_.observer(StepInfo{t, left, right, added, state_});
  }
  return std::nullopt;
}

SolverResult IndexSearch::run() {
  while (!step()) {
  }
  SolverResult out;
  out.counters = state_.counters;
  out.iterations = state_.iteration;
  out.stop_reason = *stopped_;
  if (best_log_index_) {
    const TrialRecord& best = log_[*best_log_index_];
    out.best_value = best.g;
    out.best_point = best.y;
    out.best_x = best.x;
  }
  out.trial_log = log_;
  return out;
}

SolverResult solve(const ConstrainedProblem& problem, const SolverParams& params,
                   SolveOptions options) {
  IndexSearch search(problem, params, std::move(options));
  return search.run();
}

}  // namespace idxgo
