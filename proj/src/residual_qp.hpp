#pragma once

// Least-squares transportation problem
//
//   minimize   sum_i (d_i - sum_{e in i} x_e)^2
//   subject to sum_{e in j} x_e <= c_j,  x >= 0
//
// solved with accelerated projected gradient (FISTA with function-value
// restart). Variables are edge flows; each group's feasible set is a capped
// simplex, so the projection separates by group.

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

namespace bidopt::detail {

struct QpProblem {
  std::vector<double> demand;
  std::vector<double> capacity;
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // (campaign, group)
};

enum class QpInit { kZero, kUniform, kRandom };

struct QpOptions {
  // Stop when the objective falls below this value.
  double target = 1e-20;
  // Stop when 50 iterations improve the objective by at most stall * f.
  double stall = 1e-12;
  std::size_t max_iterations = 200000;
  QpInit init = QpInit::kZero;
  std::uint64_t seed = 0;
};

struct QpResult {
  std::vector<double> x;
  double objective = 0.0;
  std::size_t iterations = 0;
};

QpResult solve_residual_qp(const QpProblem& problem, const QpOptions& options);

/// Euclidean projection of v onto {x >= 0, sum x <= cap}, in place.
void project_capped_simplex(std::vector<double>& v, double cap);

}  // namespace bidopt::detail
