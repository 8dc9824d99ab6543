// Registry of the benchmark problems P1..P5 and the randomized annulus family.

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "idxgo/problem.hpp"

namespace idxgo {
namespace {

constexpr double pi = std::numbers::pi;

double two_peak_objective(std::span<const double> y) {
  const double y1 = y[0];
  const double y2 = y[1];
  const double a = 0.5 * (y1 - 1.0);
  const double b = y2 - 1.0;
  const double first = -1.5 * y1 * y1 * std::exp(1.0 - y1 * y1 - 20.25 * (y1 - y2) * (y1 - y2));
  const double second =
      -std::pow(a * b, 4) * std::exp(2.0 - std::pow(a, 4) - std::pow(b, 4));
  return first + second;
}

ConstrainedProblem problem1() {
  ConstrainedProblem p{"P1", Box({0.0, -1.0}, {4.0, 3.0}), {}, two_peak_objective, {}, {}};
  p.constraints = {
      [](std::span<const double> y) {
        return 0.01 * ((y[0] - 2.2) * (y[0] - 2.2) + (y[1] - 1.2) * (y[1] - 1.2) - 2.25);
      },
      [](std::span<const double> y) {
        return 100.0 * (1.0 - (y[0] - 2.0) * (y[0] - 2.0) / 1.44 - (0.5 * y[1]) * (0.5 * y[1]));
      },
      [](std::span<const double> y) {
        return 10.0 * (y[1] - 1.5 - 1.5 * std::sin(6.283 * (y[0] - 1.75)));
      },
  };
  p.known_solution = KnownSolution{{0.942, 0.944}, -1.489};
  return p;
}

// Himmelblau's polynomial objective, coefficients B_1..B_20.
double polynomial_objective(std::span<const double> y) {
  static constexpr double B[21] = {
      0.0,
      75.1963666677,   -3.8112755343, 0.1269366345,  -0.0020567665, 0.0000103450,
      -6.8306567613,   0.0302344793,  -0.0012813448, 0.0000352559,  -0.0000002266,
      0.2564581253,    -0.0034604030, 0.0000135139,  -28.1064434908, -0.0000052375,
      -0.0000000063,   0.0000000007,  0.0003405462,  -0.0000016638, -2.8673112392,
  };
  const double y1 = y[0];
  const double y2 = y[1];
  const double y1_2 = y1 * y1;
  const double y1_3 = y1_2 * y1;
  const double y1_4 = y1_3 * y1;
  const double y2_2 = y2 * y2;
  const double y2_3 = y2_2 * y2;
  const double y2_4 = y2_3 * y2;
  const double sum = B[1] + B[2] * y1 + B[3] * y1_2 + B[4] * y1_3 + B[5] * y1_4 + B[6] * y2 +
                     B[7] * y1 * y2 + B[8] * y1_2 * y2 + B[9] * y1_3 * y2 + B[10] * y1_4 * y2 +
                     B[11] * y2_2 + B[12] * y2_3 + B[13] * y2_4 + B[14] / (1.0 + y2) +
                     B[15] * y1_2 * y2_2 + B[16] * y1_3 * y2_2 + B[17] * y1_3 * y2_3 +
                     B[18] * y1 * y2_2 + B[19] * y1 * y2_3 + B[20] * std::exp(0.0005 * y1 * y2);
  return -sum;
}

ConstrainedProblem problem3() {
  ConstrainedProblem p{"P3", Box({0.0, 0.0}, {80.0, 80.0}), {}, polynomial_objective, {}, {}};
  p.constraints = {
      [](std::span<const double> y) { return 450.0 - y[0] * y[1]; },
      [](std::span<const double> y) { return (0.1 * y[0] - 1.0) * (0.1 * y[0] - 1.0) - y[1]; },
      [](std::span<const double> y) {
        return 8.0 * (y[0] - 40.0) - (y[1] - 30.0) * (y[1] - 55.0);
      },
      [](std::span<const double> y) {
        return (y[0] - 35.0) * (y[0] - 30.0) / 125.0 + y[1] - 80.0;
      },
  };
  p.known_solution = KnownSolution{{77.19, 64.06}, -59.59};
  return p;
}

ConstrainedProblem problem4() {
  ConstrainedProblem p{"P4", Box({0.0, 0.0}, {2.0 * pi, 2.0 * pi}), {}, {}, {}, {}};
  p.objective = [](std::span<const double> y) {
    return -std::abs(std::sin(y[0]) * std::sin(2.0 * y[1])) +
           0.01 * (y[0] * y[1] + (y[0] - pi) * (y[0] - pi) + 3.0 * (y[1] - pi) * (y[1] - pi));
  };
  p.constraints = {
      [](std::span<const double> y) {
        return 1.0 - y[1] + pi / 2.0 - std::abs(std::sin(2.0 * y[0])) + y[0] / 3.0;
      },
      [](std::span<const double> y) {
        return y[1] - 3.0 * pi / 2.0 + 4.0 * std::abs(std::sin(y[0] + pi)) + y[0] / 3.0 - 1.9;
      },
  };
  p.known_solution = KnownSolution{{1.247, 2.392}, -0.864};
  return p;
}

ConstrainedProblem problem5(int n) {
  std::vector<double> lower(n, -6.0);
  std::vector<double> upper(n, 4.0);
  lower[0] = -2.0;
  upper[0] = 8.0;

  auto tail_sq = [](std::span<const double> y) {
    double s = 0.0;
    for (std::size_t i = 1; i < y.size(); ++i) s += y[i] * y[i];
    return s;
  };

  ConstrainedProblem p{"P5", Box(std::move(lower), std::move(upper)), {}, {}, {}, {}};
  p.objective = [](std::span<const double> y) {
    double sq = 0.0;
    for (double v : y) sq += v * v;
    const double rho = std::sqrt(sq);
    return y[0] + std::exp(rho - std::abs(rho * rho - 5.0 * rho + 4.0));
  };
  p.constraints = {
      [tail_sq](std::span<const double> y) {
        return (y[0] - 2.5) * (y[0] - 2.5) - 6.25 + tail_sq(y);
      },
      [tail_sq](std::span<const double> y) {
        return -(y[0] - 2.0) * (y[0] - 2.0) + 2.25 - tail_sq(y);
      },
      [](std::span<const double> y) {
        return y[1] - 3.0 * pi / 2.0 + 4.0 * std::abs(std::sin(y[0] + pi)) + y[0] / 3.0 + 0.8;
      },
  };
  p.known_solution = KnownSolution{Point(n, 0.0), std::exp(-4.0)};
  return p;
}

}  // namespace

ConstrainedProblem annulus_problem(double center_y1, double center_y2) {
  auto radius_sq = [center_y1, center_y2](std::span<const double> y) {
    return (y[0] - center_y1) * (y[0] - center_y1) + (y[1] - center_y2) * (y[1] - center_y2);
  };
  ConstrainedProblem p{"P2", Box({0.0, -1.0}, {4.0, 3.0}), {}, two_peak_objective, {}, {}};
  p.constraints = {
      [radius_sq](std::span<const double> y) { return -radius_sq(y) + 1.21; },
      [radius_sq](std::span<const double> y) { return radius_sq(y) - 1.25; },
  };
  return p;
}

ConstrainedProblem get_problem(const std::string& name, std::optional<int> dimension) {
  if (name != "P5" && dimension && *dimension != 2) {
    throw std::invalid_argument(name + " is two-dimensional; --dim applies to P5 only");
  }
  if (name == "P1") return problem1();
  if (name == "P2") {
    ConstrainedProblem p = annulus_problem(2.2, 1.2);
    p.known_solution = KnownSolution{{1.088, 1.088}, -1.477};
    return p;
  }
  if (name == "P3") return problem3();
  if (name == "P4") return problem4();
  if (name == "P5") {
    if (!dimension) throw std::invalid_argument("P5 requires a dimension in [2, 6]");
    if (*dimension < 2 || *dimension > 6) {
      std::ostringstream msg;
      msg << "P5 dimension must lie in [2, 6], got " << *dimension;
      throw std::invalid_argument(msg.str());
    }
    return problem5(*dimension);
  }
  throw std::invalid_argument("unknown problem '" + name + "'");
}

std::vector<std::string> problem_names() { return {"P1", "P2", "P3", "P4", "P5"}; }

std::vector<ConstrainedProblem> perturbed_annulus(std::uint64_t seed, int count) {
  if (count < 1) throw std::invalid_argument("perturbed_annulus: count must be >= 1");
  std::mt19937_64 rng(seed);
  // Open interval (-1, 1) from the top 53 bits; avoids the implementation-
  // defined uniform_real_distribution so offsets match across platforms.
  auto offset = [&rng] { return 2.0 * ((static_cast<double>(rng() >> 11) + 0.5) * 0x1p-53) - 1.0; };

  std::vector<ConstrainedProblem> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    const double d1 = offset();
    const double d2 = offset();
    ConstrainedProblem p = annulus_problem(2.2 + d1, 1.2 + d2);
    std::ostringstream name;
    name << "P2#" << i + 1;
    p.name = name.str();
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace idxgo
