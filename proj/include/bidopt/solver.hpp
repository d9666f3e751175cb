#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "bidopt/market.hpp"

namespace bidopt {

struct Tolerances {
  // QP stall threshold, relative to the current objective.
  double qp = 1e-12;
  // Done threshold on the QP objective, relative to (sum I)^2.
  double done = 1e-18;
  // Residuals below residual * (sum I) are treated as zero.
  double residual = 1e-7;
  // Absolute flow tolerance of the max-flow check, relative to sum I.
  double flow = 1e-12;
  std::size_t max_iterations = 200000;
};

enum class QpStart { kZero, kUniform, kRandom };

struct AllocOptions {
  Tolerances tol;
  QpStart start = QpStart::kZero;
  std::uint64_t seed = 0;
  // Reverse the order in which variables are laid out in the QP.
  bool reverse_order = false;
};

struct QPSolution {
  std::vector<std::size_t> campaigns;
  std::vector<std::size_t> groups;
  double price = 0.0;
  // t_ij for every admissible pair inside (campaigns, groups).
  std::map<PairKey, double> fractions;
  // Aligned with `campaigns`.
  std::vector<double> received;
  std::vector<double> residuals;
  // QP objective sum_i d_i^2 in impression units squared.
  double objective = 0.0;
  bool done = false;
  // Done as judged by the QP objective alone, before the max-flow check.
  bool objective_done = false;
  // Campaigns (instance indices) with a positive clamped residual.
  std::vector<std::size_t> deficient;
  // False when the QP's positive-residual set differed from the minimum-cut
  // deficient set and the latter was used.
  bool residual_set_matches_cut = true;
  std::size_t iterations = 0;
};

struct SubProblem {
  std::vector<std::size_t> campaigns;
  std::vector<std::size_t> groups;
};

struct SplitResult {
  SubProblem deficient;
  SubProblem rest;
};

struct Component {
  std::vector<std::size_t> campaigns;
  std::vector<std::size_t> groups;
  double price = 0.0;
  std::map<PairKey, double> fractions;
};

struct SplitRecord {
  double price = 0.0;
  // Indices into Decomposition::components of every component produced
  // below each side of this split.
  std::vector<std::size_t> deficient_side;
  std::vector<std::size_t> rest_side;
};

struct Decomposition {
  std::vector<Component> components;
  std::vector<SplitRecord> splits;
  std::size_t max_depth = 0;
  // Number of alloc calls whose objective-only done flag disagreed with the
  // max-flow verdict, and whose residual set disagreed with the cut.
  std::size_t objective_flag_overrides = 0;
  std::size_t residual_set_overrides = 0;

  std::vector<double> prices() const;
};

struct SolverOptions {
  Tolerances tol;
};

/// Smallest p with sum_{j in groups} D_j(p) >= sum_{i in campaigns} I_i.
double price(const ProblemInstance& instance, std::span<const std::size_t> campaigns,
             std::span<const std::size_t> groups);

QPSolution alloc(const ProblemInstance& instance, std::span<const std::size_t> campaigns,
                 std::span<const std::size_t> groups, double p, const AllocOptions& options = {});

SplitResult split(const ProblemInstance& instance, const QPSolution& qp);

Decomposition decompose(const ProblemInstance& instance, const SolverOptions& options = {});

PureAllocation build_allocation(const ProblemInstance& instance, const Decomposition& d);

double lower_bound(const Decomposition& d, const ProblemInstance& instance);
double component_lower_bound(const Component& c, const ProblemInstance& instance);
double gap_bound(const Decomposition& d, const ProblemInstance& instance);

struct B1Choice {
  enum class Kind { kAutomatic, kRelativeDelta, kPerComponent };
  Kind kind = Kind::kAutomatic;
  double delta = 0.0;
  std::vector<double> per_component;

  static B1Choice automatic() { return {}; }
  static B1Choice relative_delta(double d) { return {Kind::kRelativeDelta, d, {}}; }
  static B1Choice per_component_bids(std::vector<double> b) {
    return {Kind::kPerComponent, 0.0, std::move(b)};
  }
};

struct MixedGroupNote {
  std::size_t group;
  double b1 = 0.0;
  // Share a_j of the group's requests bid at b1; 0 for groups left pure.
  double share_b1 = 0.0;
  // Cost above the group's share of the lower bound.
  double excess = 0.0;
  // Empty when the group mixes; otherwise why it was left pure.
  std::string pure_reason;
};

struct MixedComponentReport {
  double price = 0.0;
  double cost = 0.0;
  double lower_bound = 0.0;
  double analytic_excess = 0.0;
  std::vector<MixedGroupNote> groups;
};

struct MixedResult {
  MixedStrategy strategy;
  double cost = 0.0;
  double lower_bound = 0.0;
  std::vector<MixedComponentReport> components;
};

/// Two-bid mixed strategy per group: bids b1 < p and p, with the group's
/// fractions scaled so that it is fully used and every campaign keeps its
/// impressions.
MixedResult build_mixed(const ProblemInstance& instance, const Decomposition& d,
                        const B1Choice& choice = B1Choice::automatic());

enum class Verdict { kVerifiedOptimal, kConditionsNotMet, kNotApplicable, kNotComponentStructured };

std::string to_string(Verdict v);

struct VerificationReport {
  Verdict verdict = Verdict::kConditionsNotMet;
  bool demand_exact = false;    // (a) every campaign gets exactly I_i
  bool supply_equals = false;   // (a) used supply equals demand at each price
  bool unused_zero_below = false;  // (b)
  bool no_cheaper_access = false;  // (c)
  bool curves_continuous = false;
  std::vector<double> prices;
  std::string detail;
};

VerificationReport verify_sufficient(const ProblemInstance& instance, const PureAllocation& alloc);

}  // namespace bidopt
