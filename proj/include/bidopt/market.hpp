#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "bidopt/supply_curve.hpp"

namespace bidopt {

struct Campaign {
  std::string id;
  double impressions = 0.0;
  // Request types the campaign targets; empty when groups are given directly.
  std::vector<std::string> criteria;
};

struct TargetingGroup {
  std::string id;
  SupplyCurve curve;
  std::vector<std::string> member_types;
};

/// Campaigns, targeting groups, and the admissibility relation between them.
///
/// Construction drops campaigns with zero demand and groups no remaining
/// campaign may bid on. Campaign and group indices refer to the retained
/// entries in input order.
class ProblemInstance {
 public:
  ProblemInstance() = default;
  /// `admissible[i]` lists the ids of the groups campaign i may bid on.
  ProblemInstance(std::vector<Campaign> campaigns, std::vector<TargetingGroup> groups,
                  const std::vector<std::vector<std::string>>& admissible);

  std::size_t num_campaigns() const { return campaigns_.size(); }
  std::size_t num_groups() const { return groups_.size(); }
  const Campaign& campaign(std::size_t i) const { return campaigns_.at(i); }
  const TargetingGroup& group(std::size_t j) const { return groups_.at(j); }
  const std::vector<Campaign>& campaigns() const { return campaigns_; }
  const std::vector<TargetingGroup>& groups() const { return groups_; }

  /// A_i, sorted.
  const std::vector<std::size_t>& admissible(std::size_t i) const { return admissible_.at(i); }
  /// B_j, sorted.
  const std::vector<std::size_t>& eligible(std::size_t j) const { return eligible_.at(j); }
  bool is_admissible(std::size_t i, std::size_t j) const;

  std::size_t campaign_index(const std::string& id) const;
  std::size_t group_index(const std::string& id) const;
  std::optional<std::size_t> find_campaign(const std::string& id) const;
  std::optional<std::size_t> find_group(const std::string& id) const;

  double total_demand() const;
  bool all_step() const;
  bool all_continuous() const;

  const std::vector<std::string>& dropped_campaigns() const { return dropped_campaigns_; }
  const std::vector<std::string>& dropped_groups() const { return dropped_groups_; }

 private:
  std::vector<Campaign> campaigns_;
  std::vector<TargetingGroup> groups_;
  std::vector<std::vector<std::size_t>> admissible_;
  std::vector<std::vector<std::size_t>> eligible_;
  std::unordered_map<std::string, std::size_t> campaign_ix_;
  std::unordered_map<std::string, std::size_t> group_ix_;
  std::vector<std::string> dropped_campaigns_;
  std::vector<std::string> dropped_groups_;
};

/// Result of partitioning a request-type universe by campaign membership.
struct TargetingPartition {
  struct Group {
    std::string id;
    std::vector<std::string> member_types;
    std::vector<std::string> campaigns;
  };
  std::vector<Group> groups;
  // Per input campaign, ids of the groups inside its criteria.
  std::vector<std::vector<std::string>> admissible;
  std::vector<std::string> dropped_types;
};

/// Groups the types of `universe` by the exact set of campaigns whose
/// criteria contain them. Types no campaign targets are dropped. Group ids
/// are the member type ids joined with '+', groups ordered by first member.
TargetingPartition build_targeting_groups(const std::vector<Campaign>& campaigns,
                                          const std::vector<std::string>& universe);

struct TypeSupply {
  std::string id;
  SupplyCurve curve;
};

/// Builds an instance from campaign criteria and one supply curve per
/// request type; each group's curve is the sum of its member types' curves.
ProblemInstance instance_from_types(std::vector<Campaign> campaigns,
                                    const std::vector<TypeSupply>& types);

struct PairKey {
  std::size_t campaign;
  std::size_t group;
  auto operator<=>(const PairKey&) const = default;
};

struct PureEntry {
  double bid = 0.0;
  double fraction = 0.0;
};

struct BidFraction {
  double bid = 0.0;
  double fraction = 0.0;
};

using PureAllocation = std::map<PairKey, PureEntry>;
using MixedStrategy = std::map<PairKey, std::vector<BidFraction>>;

/// Single-bid mixed strategy equivalent to `alloc`; zero fractions dropped.
MixedStrategy lift(const PureAllocation& alloc);

double pure_cost(const ProblemInstance& instance, const PureAllocation& alloc);
double mixed_cost(const ProblemInstance& instance, const MixedStrategy& strategy);

struct FeasibilityReport {
  std::vector<double> obtained;        // per campaign
  std::vector<double> required;        // per campaign
  std::vector<double> group_fraction;  // per group
  std::vector<bool> campaign_ok;
  std::vector<bool> group_ok;
  bool ok = true;
};

/// Relative tolerance on impressions and absolute tolerance on group fraction sums.
inline constexpr double kFeasibilityTolerance = 1e-9;

FeasibilityReport check_feasible(const ProblemInstance& instance, const PureAllocation& alloc);
FeasibilityReport check_feasible(const ProblemInstance& instance, const MixedStrategy& strategy);

}  // namespace bidopt
