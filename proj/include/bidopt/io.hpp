#pragma once

#include <string>
#include <variant>

#include "bidopt/auction_sim.hpp"
#include "bidopt/market.hpp"
#include "bidopt/oracle.hpp"
#include "bidopt/single_group.hpp"
#include "bidopt/solver.hpp"
#include "json.hpp"

namespace bidopt::io {

using json = nlohmann::ordered_json;

inline constexpr int kFormatVersion = 1;

json read_json_file(const std::string& path);
json parse_json(const std::string& text);
void write_json(const json& doc, const std::string& path);  // "-" or "" for stdout

SupplyCurve curve_from_json(const json& j);
json curve_to_json(const SupplyCurve& curve);

/// Accepts both the explicit form (campaigns list their groups, groups carry
/// curves) and the criteria form (campaigns list request types, "types"
/// carries one curve per request type).
ProblemInstance instance_from_json(const json& j);
json instance_to_json(const ProblemInstance& instance);

/// Normalizes a criteria-form document into an explicit instance document.
json build_groups(const json& criteria_doc);

/// Pure strategies may come as a pure strategy document or as a solution
/// document (its "allocation").
PureAllocation pure_from_json(const ProblemInstance& instance, const json& j);
json pure_to_json(const ProblemInstance& instance, const PureAllocation& alloc);

/// Mixed strategies accept mixed strategy documents, mixed reports (their
/// "strategy"), and anything pure_from_json accepts.
MixedStrategy mixed_from_json(const ProblemInstance& instance, const json& j);
json mixed_to_json(const ProblemInstance& instance, const MixedStrategy& strategy);

/// True when the document (or its nested strategy) is a mixed strategy.
bool is_mixed_document(const json& j);

json solution_to_json(const ProblemInstance& instance, const Decomposition& d);
json mixed_report_to_json(const ProblemInstance& instance, const MixedResult& r);
json verification_to_json(const VerificationReport& r);
json single_to_json(const SingleGroupSolution& s);
json two_point_to_json(const TwoPointMix& m);
json oracle_to_json(const ProblemInstance& instance, const OracleResult& r, bool mixed);
json feasibility_to_json(const ProblemInstance& instance, const FeasibilityReport& r);
json simulation_to_json(const ProblemInstance& instance, const SimReport& r);

}  // namespace bidopt::io
