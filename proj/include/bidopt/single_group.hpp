#pragma once

#include <vector>

#include "bidopt/market.hpp"
#include "bidopt/supply_curve.hpp"

namespace bidopt {

/// Optimal pure bid for one campaign on one targeting group, together with
/// the lower bound over mixed strategies and the bound on the gap between
/// the two.
struct SingleGroupSolution {
  double b_star = 0.0;
  double gamma_star = 0.0;
  double pure_cost = 0.0;
  double lower_bound = 0.0;
  // min(unused_share_bound, jump_bound)
  double gap_bound = 0.0;
  // (1 - gamma*) * integral(b*)
  double unused_share_bound = 0.0;
  // (D(b*) - D^-(b*)) / D(b*) * integral(b*)
  double jump_bound = 0.0;
};

SingleGroupSolution solve_single(const SupplyCurve& curve, double demand);

struct TwoPointMix {
  std::vector<BidFraction> bids;  // (b1, gamma(b1)), (b*, gamma(b*))
  double impressions = 0.0;
  double cost = 0.0;
};

/// Mixed strategy bidding b1 on a share (D(b*) - demand) / (D(b*) - D(b1))
/// of the requests and b* on the rest.
TwoPointMix two_point_mixed(const SupplyCurve& curve, double demand, double b1);

}  // namespace bidopt
