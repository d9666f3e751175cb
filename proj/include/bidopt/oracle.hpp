#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bidopt/market.hpp"

namespace bidopt {

/// Discretization for the brute-force oracles. Bids range over each group's
/// knot bids, optionally refined by `subdivisions` equal steps per knot
/// interval; fractions range over {0, 1/q, ..., 1}.
struct GridSpec {
  int gamma_steps = 20;
  int subdivisions = 1;
  // Optional extra bids per group (indexed like the instance's groups).
  std::vector<std::vector<double>> extra_bids;
  // Refuse searches whose state count would exceed this.
  double max_states = 1e8;
};

struct OracleResult {
  bool feasible = false;
  double cost = 0.0;
  // Empty for the pure search.
  MixedStrategy strategy;
  // Filled by the pure search; the single-bid view of `strategy` otherwise empty.
  PureAllocation allocation;
  double states_searched = 0.0;
  // (1/q) * sum_j win_cost(D_j, last knot): discretization allowance.
  double slack = 0.0;
};

/// Cheapest pure strategy on the grid meeting every campaign's demand.
OracleResult grid_pure_optimum(const ProblemInstance& instance, const GridSpec& spec);

/// Cheapest strategy on the grid using at most `bids_per_pair` bid values per
/// (campaign, group) pair.
OracleResult grid_mixed_cost(const ProblemInstance& instance, const GridSpec& spec,
                             int bids_per_pair = 2);

struct MaxflowReport {
  bool feasible = false;
  // True when the check ran in exact integer arithmetic.
  bool exact = false;
  double max_flow = 0.0;
  double demand = 0.0;
};

/// Whether campaigns can be fully served by the groups at bid p, by an
/// augmenting-path max-flow.
MaxflowReport maxflow_check(const ProblemInstance& instance, std::span<const std::size_t> campaigns,
                            std::span<const std::size_t> groups, double p);

bool maxflow_feasible(const ProblemInstance& instance, std::span<const std::size_t> campaigns,
                      std::span<const std::size_t> groups, double p);

}  // namespace bidopt
