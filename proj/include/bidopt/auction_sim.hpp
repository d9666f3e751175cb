#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <variant>
#include <vector>

#include "bidopt/market.hpp"

namespace bidopt {

struct BidRequest {
  std::size_t group = 0;
  double competing_price = 0.0;
};

/// Decision of the online bidder for one request.
struct ServeDecision {
  bool bid = false;
  std::size_t campaign = 0;
  double value = 0.0;
};

/// Bid-request streams and auctions are driven by mt19937_64. Each
/// (seed, replication, group) triple gets its own engine, seeded through a
/// splitmix64 mix, so runs are reproducible and independent of evaluation
/// order. Uniform draws take the top 53 bits of one engine output.
class StreamRng {
 public:
  StreamRng(std::uint64_t seed, std::uint64_t replication, std::uint64_t group);
  double uniform();
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

/// V_j requests for group j, each with a competing price drawn from the
/// atoms of the group's step curve. With `poisson`, the request count is
/// Poisson with mean V_j.
std::vector<BidRequest> sample_stream(const ProblemInstance& instance, std::size_t group,
                                      std::uint64_t seed, std::uint64_t replication = 0,
                                      bool poisson = false);

/// Chooses a campaign and bid for a request of the given group with the
/// strategy's fractions, using one uniform draw `u` in [0, 1). Entries are
/// scanned in (campaign, bid) order; u beyond the total fraction means no bid.
ServeDecision serve(const PureAllocation& strategy, std::size_t group, double u);
ServeDecision serve(const MixedStrategy& strategy, std::size_t group, double u);

struct SimOptions {
  std::uint64_t seed = 0;
  std::size_t replications = 1;
  bool poisson = false;
};

struct CampaignSimStats {
  double mean_impressions = 0.0;
  double mean_cost = 0.0;
  double expected_impressions = 0.0;
  double expected_cost = 0.0;
  // Standard errors of the replication means, from the analytic variance.
  double se_impressions = 0.0;
  double se_cost = 0.0;
  double z_impressions = 0.0;
  double z_cost = 0.0;
};

struct GroupSimStats {
  std::uint64_t requests = 0;
  std::uint64_t bids = 0;
  std::uint64_t wins = 0;
};

struct SimReport {
  std::vector<CampaignSimStats> campaigns;
  std::vector<GroupSimStats> groups;
  std::size_t replications = 0;
  std::uint64_t seed = 0;
  bool poisson = false;
  double mean_total_cost = 0.0;
  double expected_total_cost = 0.0;
};

SimReport run_simulation(const ProblemInstance& instance, const MixedStrategy& strategy,
                         const SimOptions& options);
SimReport run_simulation(const ProblemInstance& instance, const PureAllocation& strategy,
                         const SimOptions& options);

}  // namespace bidopt
