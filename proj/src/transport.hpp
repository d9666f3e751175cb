#pragma once

// Bipartite transportation flows between campaigns (supplies) and groups
// (capacities), in floating point with an absolute tolerance. Internal to
// the solver; the oracle module carries its own exact implementation.

#include <cstddef>
#include <utility>
#include <vector>

namespace bidopt::detail {

struct TransportProblem {
  std::vector<double> demand;    // per campaign
  std::vector<double> capacity;  // per group
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // (campaign, group)
};

struct TransportResult {
  double flow = 0.0;
  std::vector<double> edge_flow;
  // Campaigns reachable from the source in the final residual graph: the
  // smallest set whose demand exceeds what its neighbourhood can supply.
  std::vector<bool> deficient;
};

/// Maximum flow from campaigns to groups. With `first_phase`, group j is
/// first capped at first_phase[j] and only then raised to its capacity,
/// which pushes each group as close to its first-phase level as the demands
/// allow.
TransportResult max_transport(const TransportProblem& problem, double eps,
                              const std::vector<double>* first_phase = nullptr);

}  // namespace bidopt::detail
