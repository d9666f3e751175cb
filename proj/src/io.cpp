#include "bidopt/io.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "bidopt/errors.hpp"

namespace bidopt::io {

namespace {

void check_keys(const json& j, const std::string& what, std::initializer_list<const char*> required,
                std::initializer_list<const char*> optional = {}) {
  if (!j.is_object()) throw SchemaError(what + " must be a JSON object");
  std::set<std::string> allowed;
  for (const char* k : required) {
    allowed.insert(k);
    if (!j.contains(k)) throw SchemaError(what + " is missing \"" + k + "\"");
  }
  for (const char* k : optional) allowed.insert(k);
  for (const auto& [k, v] : j.items())
    if (!allowed.contains(k)) throw SchemaError(what + " has unknown field \"" + k + "\"");
}

void check_version(const json& j, const std::string& what) {
  const auto& v = j.at("version");
  if (!v.is_number_integer() || v.get<int>() != kFormatVersion)
    throw SchemaError(what + " must have \"version\": 1");
}

double number(const json& j, const std::string& what) {
  if (!j.is_number()) throw SchemaError(what + " must be a number");
  const double x = j.get<double>();
  if (!std::isfinite(x)) throw SchemaError(what + " must be finite");
  return x;
}

std::string string(const json& j, const std::string& what) {
  if (!j.is_string()) throw SchemaError(what + " must be a string");
  return j.get<std::string>();
}

std::vector<std::string> strings(const json& j, const std::string& what) {
  if (!j.is_array()) throw SchemaError(what + " must be an array of strings");
  std::vector<std::string> out;
  for (const auto& e : j) out.push_back(string(e, what + " entry"));
  return out;
}

const json& array(const json& j, const std::string& what) {
  if (!j.is_array()) throw SchemaError(what + " must be an array");
  return j;
}

// JSON has no infinities; they are written as null.
json num(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

}  // namespace

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw SchemaError(std::string("invalid JSON: ") + e.what());
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str());
}

void write_json(const json& doc, const std::string& path) {
  const std::string text = doc.dump(2) + "\n";
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
}

SupplyCurve curve_from_json(const json& j) {
  const std::string what = "curve";
  if (!j.is_object()) throw SchemaError("curve must be a JSON object");
  const std::string kind = string(j.at("kind"), "curve kind");
  std::vector<SupplyCurve::Knot> knots;
  if (!j.contains("knots")) throw SchemaError("curve is missing \"knots\"");
  for (const auto& k : array(j.at("knots"), "curve knots")) {
    if (!k.is_array() || k.size() != 2) throw SchemaError("each knot must be [bid, volume]");
    knots.push_back({number(k[0], "knot bid"), number(k[1], "knot volume")});
  }
  if (kind == "step") {
    check_keys(j, what, {"kind", "knots"});
    return SupplyCurve::step(std::move(knots));
  }
  if (kind == "linear") {
    check_keys(j, what, {"kind", "knots"});
    return SupplyCurve::linear(std::move(knots));
  }
  if (kind == "mixed") {
    check_keys(j, what, {"kind", "knots", "segments"});
    std::vector<SupplyCurve::Segment> segs;
    for (const auto& s : strings(j.at("segments"), "curve segments")) {
      if (s == "step") segs.push_back(SupplyCurve::Segment::kStep);
      else if (s == "linear") segs.push_back(SupplyCurve::Segment::kLinear);
      else throw SchemaError("segment kind must be \"step\" or \"linear\"");
    }
    if (!knots.empty() && segs.size() != knots.size() - 1)
      throw SchemaError("\"segments\" must have one entry per knot interval");
    return SupplyCurve::mixed(std::move(knots), std::move(segs));
  }
  if (kind == "piecewise") {
    check_keys(j, what, {"kind", "knots", "limits"});
    std::vector<double> limits;
    for (const auto& v : array(j.at("limits"), "curve limits")) limits.push_back(number(v, "left limit"));
    if (!knots.empty() && limits.size() != knots.size() - 1)
      throw SchemaError("\"limits\" must have one entry per knot interval");
    return SupplyCurve::piecewise(std::move(knots), std::move(limits));
  }
  throw SchemaError("unknown curve kind \"" + kind + "\"");
}

json curve_to_json(const SupplyCurve& curve) {
  json knots = json::array();
  for (std::size_t k = 0; k < curve.size(); ++k) knots.push_back({curve.bids()[k], curve.values()[k]});
  const std::size_t n = curve.size();
  bool all_flat = true, all_cont = true, each_one = true;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const bool f = curve.segment_is_flat(k);
    const bool c = curve.segment_is_continuous(k);
    all_flat = all_flat && f;
    all_cont = all_cont && c;
    each_one = each_one && (f || c);
  }
  if (all_flat) return {{"kind", "step"}, {"knots", knots}};
  if (all_cont) return {{"kind", "linear"}, {"knots", knots}};
  if (each_one) {
    json segs = json::array();
    for (std::size_t k = 0; k + 1 < n; ++k) segs.push_back(curve.segment_is_flat(k) ? "step" : "linear");
    return {{"kind", "mixed"}, {"knots", knots}, {"segments", segs}};
  }
  json limits = json::array();
  for (std::size_t k = 1; k < n; ++k) limits.push_back(curve.knot_left_limits()[k]);
  return {{"kind", "piecewise"}, {"knots", knots}, {"limits", limits}};
}

namespace {

Campaign campaign_from_json(const json& c, bool criteria_form, std::vector<std::string>& groups) {
  if (criteria_form)
    check_keys(c, "campaign", {"id", "impressions", "criteria"});
  else
    check_keys(c, "campaign", {"id", "impressions", "groups"});
  Campaign out;
  out.id = string(c.at("id"), "campaign id");
  out.impressions = number(c.at("impressions"), "campaign impressions");
  if (criteria_form)
    out.criteria = strings(c.at("criteria"), "campaign criteria");
  else
    groups = strings(c.at("groups"), "campaign groups");
  return out;
}

}  // namespace

ProblemInstance instance_from_json(const json& j) {
  if (!j.is_object()) throw SchemaError("instance must be a JSON object");
  const bool criteria_form = j.contains("types");
  if (criteria_form)
    check_keys(j, "instance", {"version", "campaigns", "types"});
  else
    check_keys(j, "instance", {"version", "campaigns", "groups"});
  check_version(j, "instance");

  std::vector<Campaign> campaigns;
  std::vector<std::vector<std::string>> admissible;
  for (const auto& c : array(j.at("campaigns"), "campaigns")) {
    std::vector<std::string> gs;
    campaigns.push_back(campaign_from_json(c, criteria_form, gs));
    admissible.push_back(std::move(gs));
  }
  if (criteria_form) {
    std::vector<TypeSupply> types;
    for (const auto& t : array(j.at("types"), "types")) {
      check_keys(t, "type", {"id", "curve"});
      types.push_back({string(t.at("id"), "type id"), curve_from_json(t.at("curve"))});
    }
    return instance_from_types(std::move(campaigns), types);
  }
  std::vector<TargetingGroup> groups;
  for (const auto& g : array(j.at("groups"), "groups")) {
    check_keys(g, "group", {"id", "curve"}, {"types"});
    TargetingGroup tg;
    tg.id = string(g.at("id"), "group id");
    tg.curve = curve_from_json(g.at("curve"));
    if (g.contains("types")) tg.member_types = strings(g.at("types"), "group types");
    groups.push_back(std::move(tg));
  }
  return ProblemInstance(std::move(campaigns), std::move(groups), admissible);
}

json instance_to_json(const ProblemInstance& instance) {
  json campaigns = json::array();
  for (std::size_t i = 0; i < instance.num_campaigns(); ++i) {
    json gs = json::array();
    for (auto j : instance.admissible(i)) gs.push_back(instance.group(j).id);
    campaigns.push_back({{"id", instance.campaign(i).id},
                         {"impressions", instance.campaign(i).impressions},
                         {"groups", gs}});
  }
  json groups = json::array();
  for (const auto& g : instance.groups()) {
    json e = {{"id", g.id}, {"curve", curve_to_json(g.curve)}};
    if (!g.member_types.empty()) e["types"] = g.member_types;
    groups.push_back(std::move(e));
  }
  return {{"version", kFormatVersion}, {"campaigns", campaigns}, {"groups", groups}};
}

json build_groups(const json& criteria_doc) {
  if (!criteria_doc.is_object() || !criteria_doc.contains("types"))
    throw SchemaError("criteria document needs a \"types\" list");
  return instance_to_json(instance_from_json(criteria_doc));
}

namespace {

PairKey pair_from_json(const ProblemInstance& instance, const json& e) {
  const auto cid = string(e.at("campaign"), "entry campaign");
  const auto gid = string(e.at("group"), "entry group");
  PairKey key{instance.campaign_index(cid), instance.group_index(gid)};
  if (!instance.is_admissible(key.campaign, key.group))
    throw DomainError("campaign '" + cid + "' may not bid on group '" + gid + "'");
  return key;
}

const json& strategy_body(const json& j, std::string& kind) {
  if (!j.is_object() || !j.contains("kind")) throw SchemaError("strategy document needs a \"kind\"");
  kind = string(j.at("kind"), "strategy kind");
  if (kind == "solution") {
    const auto& a = j.at("allocation");
    return strategy_body(a, kind);
  }
  if (kind == "mixed_report") {
    const auto& s = j.at("strategy");
    return strategy_body(s, kind);
  }
  return j;
}

}  // namespace

bool is_mixed_document(const json& j) {
  std::string kind;
  strategy_body(j, kind);
  return kind == "mixed";
}

PureAllocation pure_from_json(const ProblemInstance& instance, const json& j) {
  std::string kind;
  const json& body = strategy_body(j, kind);
  if (kind != "pure") throw SchemaError("expected a pure strategy, got kind \"" + kind + "\"");
  check_keys(body, "pure strategy", {"version", "kind", "entries"});
  check_version(body, "pure strategy");
  PureAllocation out;
  for (const auto& e : array(body.at("entries"), "entries")) {
    check_keys(e, "pure entry", {"campaign", "group", "bid", "fraction"});
    auto key = pair_from_json(instance, e);
    if (out.contains(key)) throw SchemaError("duplicate strategy entry");
    out[key] = {number(e.at("bid"), "bid"), number(e.at("fraction"), "fraction")};
  }
  return out;
}

json pure_to_json(const ProblemInstance& instance, const PureAllocation& alloc) {
  json entries = json::array();
  for (const auto& [key, e] : alloc)
    entries.push_back({{"campaign", instance.campaign(key.campaign).id},
                       {"group", instance.group(key.group).id},
                       {"bid", e.bid},
                       {"fraction", e.fraction}});
  return {{"version", kFormatVersion}, {"kind", "pure"}, {"entries", entries}};
}

MixedStrategy mixed_from_json(const ProblemInstance& instance, const json& j) {
  std::string kind;
  const json& body = strategy_body(j, kind);
  if (kind == "pure") return lift(pure_from_json(instance, body));
  if (kind != "mixed") throw SchemaError("expected a strategy, got kind \"" + kind + "\"");
  check_keys(body, "mixed strategy", {"version", "kind", "entries"});
  check_version(body, "mixed strategy");
  MixedStrategy out;
  for (const auto& e : array(body.at("entries"), "entries")) {
    check_keys(e, "mixed entry", {"campaign", "group", "bids"});
    auto key = pair_from_json(instance, e);
    if (out.contains(key)) throw SchemaError("duplicate strategy entry");
    auto& bids = out[key];
    for (const auto& b : array(e.at("bids"), "bids")) {
      check_keys(b, "bid entry", {"bid", "fraction"});
      BidFraction bf{number(b.at("bid"), "bid"), number(b.at("fraction"), "fraction")};
      for (const auto& other : bids)
        if (std::abs(other.bid - bf.bid) <= kBidTolerance)
          throw DomainError("bids within one strategy entry must be distinct");
      bids.push_back(bf);
    }
  }
  return out;
}

json mixed_to_json(const ProblemInstance& instance, const MixedStrategy& strategy) {
  json entries = json::array();
  for (const auto& [key, bids] : strategy) {
    json bs = json::array();
    for (const auto& b : bids) bs.push_back({{"bid", b.bid}, {"fraction", b.fraction}});
    entries.push_back({{"campaign", instance.campaign(key.campaign).id},
                       {"group", instance.group(key.group).id},
                       {"bids", bs}});
  }
  return {{"version", kFormatVersion}, {"kind", "mixed"}, {"entries", entries}};
}

json solution_to_json(const ProblemInstance& instance, const Decomposition& d) {
  json comps = json::array();
  for (const auto& c : d.components) {
    json cs = json::array(), gs = json::array(), fr = json::object();
    for (auto i : c.campaigns) cs.push_back(instance.campaign(i).id);
    for (auto j : c.groups) gs.push_back(instance.group(j).id);
    for (const auto& [key, t] : c.fractions) fr[instance.campaign(key.campaign).id][instance.group(key.group).id] = t;
    comps.push_back({{"price", c.price}, {"campaigns", cs}, {"groups", gs}, {"fractions", fr}});
  }
  const auto alloc = build_allocation(instance, d);
  return {{"version", kFormatVersion},
          {"kind", "solution"},
          {"components", comps},
          {"prices", d.prices()},
          {"allocation", pure_to_json(instance, alloc)},
          {"lower_bound", lower_bound(d, instance)},
          {"pure_cost", pure_cost(instance, alloc)},
          {"gap_bound", gap_bound(d, instance)}};
}

json mixed_report_to_json(const ProblemInstance& instance, const MixedResult& r) {
  json comps = json::array();
  for (const auto& c : r.components) {
    json gs = json::array();
    for (const auto& g : c.groups) {
      json e = {{"group", instance.group(g.group).id}, {"share_b1", g.share_b1}, {"excess", g.excess}};
      if (g.pure_reason.empty())
        e["b1"] = g.b1;
      else
        e["pure"] = g.pure_reason;
      gs.push_back(std::move(e));
    }
    comps.push_back({{"price", c.price},
                     {"cost", c.cost},
                     {"lower_bound", c.lower_bound},
                     {"analytic_excess", c.analytic_excess},
                     {"groups", gs}});
  }
  return {{"version", kFormatVersion},
          {"kind", "mixed_report"},
          {"strategy", mixed_to_json(instance, r.strategy)},
          {"cost", r.cost},
          {"lower_bound", r.lower_bound},
          {"components", comps}};
}

json verification_to_json(const VerificationReport& r) {
  return {{"version", kFormatVersion},
          {"kind", "verification"},
          {"verdict", to_string(r.verdict)},
          {"demand_exact", r.demand_exact},
          {"supply_equals_demand", r.supply_equals},
          {"unused_groups_zero_below_price", r.unused_zero_below},
          {"no_access_to_cheaper_components", r.no_cheaper_access},
          {"curves_continuous", r.curves_continuous},
          {"prices", r.prices},
          {"detail", r.detail}};
}

json single_to_json(const SingleGroupSolution& s) {
  return {{"version", kFormatVersion},
          {"kind", "single"},
          {"b_star", s.b_star},
          {"gamma_star", s.gamma_star},
          {"pure_cost", s.pure_cost},
          {"lower_bound", s.lower_bound},
          {"gap_bound", s.gap_bound},
          {"unused_share_bound", s.unused_share_bound},
          {"jump_bound", s.jump_bound}};
}

json two_point_to_json(const TwoPointMix& m) {
  json bs = json::array();
  for (const auto& b : m.bids) bs.push_back({{"bid", b.bid}, {"fraction", b.fraction}});
  return {{"bids", bs}, {"impressions", m.impressions}, {"cost", m.cost}};
}

json oracle_to_json(const ProblemInstance& instance, const OracleResult& r, bool mixed) {
  json out = {{"version", kFormatVersion},
              {"kind", mixed ? "oracle_mixed" : "oracle_pure"},
              {"feasible", r.feasible},
              {"cost", r.feasible ? num(r.cost) : json(nullptr)},
              {"states_searched", r.states_searched},
              {"slack", r.slack}};
  if (mixed)
    out["strategy"] = mixed_to_json(instance, r.strategy);
  else
    out["allocation"] = pure_to_json(instance, r.allocation);
  return out;
}

json feasibility_to_json(const ProblemInstance& instance, const FeasibilityReport& r) {
  json cs = json::array(), gs = json::array();
  for (std::size_t i = 0; i < r.obtained.size(); ++i)
    cs.push_back({{"campaign", instance.campaign(i).id},
                  {"obtained", r.obtained[i]},
                  {"required", r.required[i]},
                  {"ok", static_cast<bool>(r.campaign_ok[i])}});
  for (std::size_t j = 0; j < r.group_fraction.size(); ++j)
    gs.push_back({{"group", instance.group(j).id},
                  {"fraction", r.group_fraction[j]},
                  {"ok", static_cast<bool>(r.group_ok[j])}});
  return {{"ok", r.ok}, {"campaigns", cs}, {"groups", gs}};
}

json simulation_to_json(const ProblemInstance& instance, const SimReport& r) {
  json cs = json::array(), gs = json::array();
  for (std::size_t i = 0; i < r.campaigns.size(); ++i) {
    const auto& c = r.campaigns[i];
    cs.push_back({{"campaign", instance.campaign(i).id},
                  {"mean_impressions", c.mean_impressions},
                  {"mean_cost", c.mean_cost},
                  {"analytic",
                   {{"impressions", c.expected_impressions},
                    {"cost", c.expected_cost},
                    {"se_impressions", c.se_impressions},
                    {"se_cost", c.se_cost},
                    {"z_impressions", num(c.z_impressions)},
                    {"z_cost", num(c.z_cost)}}}});
  }
  for (std::size_t j = 0; j < r.groups.size(); ++j)
    gs.push_back({{"group", instance.group(j).id},
                  {"requests", r.groups[j].requests},
                  {"bids", r.groups[j].bids},
                  {"wins", r.groups[j].wins}});
  return {{"version", kFormatVersion},
          {"kind", "simulation"},
          {"seed", r.seed},
          {"replications", r.replications},
          {"poisson", r.poisson},
          {"campaigns", cs},
          {"groups", gs},
          {"mean_total_cost", r.mean_total_cost},
          {"analytic_total_cost", r.expected_total_cost}};
}

}  // namespace bidopt::io
