#include "bidopt/market.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "bidopt/errors.hpp"

namespace bidopt {

ProblemInstance::ProblemInstance(std::vector<Campaign> campaigns,
                                 std::vector<TargetingGroup> groups,
                                 const std::vector<std::vector<std::string>>& admissible) {
  if (admissible.size() != campaigns.size())
    throw DomainError("admissibility list must have one entry per campaign");

  std::unordered_map<std::string, std::size_t> all_groups;
  for (std::size_t j = 0; j < groups.size(); ++j) {
    if (groups[j].id.empty()) throw DomainError("group id must not be empty");
    if (!all_groups.emplace(groups[j].id, j).second)
      throw DomainError("duplicate group id '" + groups[j].id + "'");
  }

  std::set<std::string> seen_campaigns;
  std::vector<bool> group_used(groups.size(), false);
  std::vector<std::size_t> kept;
  std::vector<std::vector<std::size_t>> kept_adm;
  for (std::size_t i = 0; i < campaigns.size(); ++i) {
    const auto& c = campaigns[i];
    if (c.id.empty()) throw DomainError("campaign id must not be empty");
    if (!seen_campaigns.insert(c.id).second)
      throw DomainError("duplicate campaign id '" + c.id + "'");
    if (!std::isfinite(c.impressions) || c.impressions < 0.0)
      throw DomainError("campaign '" + c.id + "' has invalid impression target");
    std::vector<std::size_t> adm;
    for (const auto& gid : admissible[i]) {
      auto it = all_groups.find(gid);
      if (it == all_groups.end())
        throw DomainError("campaign '" + c.id + "' references unknown group '" + gid + "'");
      adm.push_back(it->second);
    }
    std::sort(adm.begin(), adm.end());
    adm.erase(std::unique(adm.begin(), adm.end()), adm.end());
    if (c.impressions == 0.0) {
      dropped_campaigns_.push_back(c.id);
      continue;
    }
    for (auto j : adm) group_used[j] = true;
    kept.push_back(i);
    kept_adm.push_back(std::move(adm));
  }

  std::vector<std::size_t> new_group(groups.size(), SIZE_MAX);
  for (std::size_t j = 0; j < groups.size(); ++j) {
    if (!group_used[j]) {
      dropped_groups_.push_back(groups[j].id);
      continue;
    }
    new_group[j] = groups_.size();
    group_ix_.emplace(groups[j].id, groups_.size());
    groups_.push_back(std::move(groups[j]));
  }
  eligible_.assign(groups_.size(), {});
  for (std::size_t k = 0; k < kept.size(); ++k) {
    campaign_ix_.emplace(campaigns[kept[k]].id, campaigns_.size());
    std::vector<std::size_t> adm;
    for (auto j : kept_adm[k]) {
      adm.push_back(new_group[j]);
      eligible_[new_group[j]].push_back(campaigns_.size());
    }
    admissible_.push_back(std::move(adm));
    campaigns_.push_back(std::move(campaigns[kept[k]]));
  }
}

bool ProblemInstance::is_admissible(std::size_t i, std::size_t j) const {
  if (i >= admissible_.size()) return false;
  const auto& a = admissible_[i];
  return std::binary_search(a.begin(), a.end(), j);
}

std::optional<std::size_t> ProblemInstance::find_campaign(const std::string& id) const {
  auto it = campaign_ix_.find(id);
  if (it == campaign_ix_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> ProblemInstance::find_group(const std::string& id) const {
  auto it = group_ix_.find(id);
  if (it == group_ix_.end()) return std::nullopt;
  return it->second;
}

std::size_t ProblemInstance::campaign_index(const std::string& id) const {
  if (auto i = find_campaign(id)) return *i;
  throw DomainError("unknown campaign '" + id + "'");
}

std::size_t ProblemInstance::group_index(const std::string& id) const {
  if (auto j = find_group(id)) return *j;
  throw DomainError("unknown group '" + id + "'");
}

double ProblemInstance::total_demand() const {
  double s = 0.0;
  for (const auto& c : campaigns_) s += c.impressions;
  return s;
}

bool ProblemInstance::all_step() const {
  return std::all_of(groups_.begin(), groups_.end(),
                     [](const TargetingGroup& g) { return g.curve.is_step(); });
}

bool ProblemInstance::all_continuous() const {
  return std::all_of(groups_.begin(), groups_.end(),
                     [](const TargetingGroup& g) { return g.curve.is_continuous(); });
}

TargetingPartition build_targeting_groups(const std::vector<Campaign>& campaigns,
                                          const std::vector<std::string>& universe) {
  if (universe.empty()) throw DomainError("request type universe is empty");
  std::unordered_map<std::string, std::size_t> type_ix;
  for (std::size_t t = 0; t < universe.size(); ++t)
    if (!type_ix.emplace(universe[t], t).second)
      throw DomainError("duplicate request type '" + universe[t] + "'");

  std::vector<std::vector<std::size_t>> signature(universe.size());
  for (std::size_t i = 0; i < campaigns.size(); ++i) {
    const auto& c = campaigns[i];
    if (c.criteria.empty()) throw DomainError("campaign '" + c.id + "' has empty criteria");
    std::set<std::size_t> types;
    for (const auto& t : c.criteria) {
      auto it = type_ix.find(t);
      if (it == type_ix.end())
        throw DomainError("campaign '" + c.id + "' targets unknown type '" + t + "'");
      types.insert(it->second);
    }
    for (auto t : types) signature[t].push_back(i);
  }

  TargetingPartition out;
  out.admissible.assign(campaigns.size(), {});
  std::map<std::vector<std::size_t>, std::size_t> by_signature;
  for (std::size_t t = 0; t < universe.size(); ++t) {
    if (signature[t].empty()) {
      out.dropped_types.push_back(universe[t]);
      continue;
    }
    auto [it, fresh] = by_signature.emplace(signature[t], out.groups.size());
    if (fresh) {
      TargetingPartition::Group g;
      for (auto i : signature[t]) g.campaigns.push_back(campaigns[i].id);
      out.groups.push_back(std::move(g));
    }
    out.groups[it->second].member_types.push_back(universe[t]);
  }
  for (auto& [sig, gix] : by_signature) {
    auto& g = out.groups[gix];
    std::ostringstream id;
    for (std::size_t k = 0; k < g.member_types.size(); ++k) id << (k ? "+" : "") << g.member_types[k];
    g.id = id.str();
  }
  for (auto& [sig, gix] : by_signature)
    for (auto i : sig) out.admissible[i].push_back(out.groups[gix].id);
  // Order each campaign's groups by group position.
  for (auto& adm : out.admissible) {
    std::sort(adm.begin(), adm.end(), [&](const std::string& a, const std::string& b) {
      auto pos = [&](const std::string& id) {
        for (std::size_t k = 0; k < out.groups.size(); ++k)
          if (out.groups[k].id == id) return k;
        return out.groups.size();
      };
      return pos(a) < pos(b);
    });
  }
  return out;
}

ProblemInstance instance_from_types(std::vector<Campaign> campaigns,
                                    const std::vector<TypeSupply>& types) {
  std::vector<std::string> universe;
  std::unordered_map<std::string, const SupplyCurve*> curve_of;
  for (const auto& t : types) {
    universe.push_back(t.id);
    curve_of[t.id] = &t.curve;
  }
  auto part = build_targeting_groups(campaigns, universe);
  std::vector<TargetingGroup> groups;
  for (const auto& g : part.groups) {
    std::vector<SupplyCurve> parts;
    for (const auto& t : g.member_types)
      if (!curve_of.at(t)->empty()) parts.push_back(*curve_of.at(t));
    SupplyCurve curve = parts.empty() ? SupplyCurve{} : aggregate(parts);
    groups.push_back({g.id, std::move(curve), g.member_types});
  }
  return ProblemInstance(std::move(campaigns), std::move(groups), part.admissible);
}

MixedStrategy lift(const PureAllocation& alloc) {
  MixedStrategy out;
  for (const auto& [key, e] : alloc)
    if (e.fraction > 0.0) out[key].push_back({e.bid, e.fraction});
  return out;
}

namespace {

void check_pair(const ProblemInstance& instance, const PairKey& key) {
  if (key.campaign >= instance.num_campaigns() || key.group >= instance.num_groups())
    throw DomainError("strategy entry references an unknown campaign or group");
  if (!instance.is_admissible(key.campaign, key.group)) {
    throw DomainError("campaign '" + instance.campaign(key.campaign).id +
                      "' may not bid on group '" + instance.group(key.group).id + "'");
  }
}

void check_entry(double bid, double fraction) {
  if (!std::isfinite(bid) || bid < 0.0) throw DomainError("strategy bids must be non-negative");
  if (!std::isfinite(fraction) || fraction < 0.0 || fraction > 1.0 + kFeasibilityTolerance)
    throw DomainError("strategy fractions must lie in [0, 1]");
}

FeasibilityReport make_report(const ProblemInstance& instance) {
  FeasibilityReport r;
  r.obtained.assign(instance.num_campaigns(), 0.0);
  r.group_fraction.assign(instance.num_groups(), 0.0);
  for (const auto& c : instance.campaigns()) r.required.push_back(c.impressions);
  return r;
}

void finish_report(FeasibilityReport& r) {
  r.ok = true;
  r.campaign_ok.clear();
  r.group_ok.clear();
  for (std::size_t i = 0; i < r.obtained.size(); ++i) {
    const double eps = r.required[i] > 0.0 ? kFeasibilityTolerance * r.required[i] : 1.0;
    r.campaign_ok.push_back(r.obtained[i] >= r.required[i] - eps);
    r.ok = r.ok && r.campaign_ok.back();
  }
  for (double f : r.group_fraction) {
    r.group_ok.push_back(f <= 1.0 + kFeasibilityTolerance);
    r.ok = r.ok && r.group_ok.back();
  }
}

}  // namespace

double pure_cost(const ProblemInstance& instance, const PureAllocation& alloc) {
  double total = 0.0;
  for (const auto& [key, e] : alloc) {
    check_pair(instance, key);
    check_entry(e.bid, e.fraction);
    if (e.fraction == 0.0) continue;
    total += e.fraction * instance.group(key.group).curve.win_cost(e.bid);
  }
  return total;
}

double mixed_cost(const ProblemInstance& instance, const MixedStrategy& strategy) {
  double total = 0.0;
  for (const auto& [key, bids] : strategy) {
    check_pair(instance, key);
    for (const auto& bf : bids) {
      check_entry(bf.bid, bf.fraction);
      if (bf.fraction == 0.0) continue;
      total += bf.fraction * instance.group(key.group).curve.win_cost(bf.bid);
    }
  }
  return total;
}

FeasibilityReport check_feasible(const ProblemInstance& instance, const PureAllocation& alloc) {
  auto r = make_report(instance);
  for (const auto& [key, e] : alloc) {
    check_pair(instance, key);
    check_entry(e.bid, e.fraction);
    r.obtained[key.campaign] += e.fraction * instance.group(key.group).curve.eval(e.bid);
    r.group_fraction[key.group] += e.fraction;
  }
  finish_report(r);
  return r;
}

FeasibilityReport check_feasible(const ProblemInstance& instance, const MixedStrategy& strategy) {
  auto r = make_report(instance);
  for (const auto& [key, bids] : strategy) {
    check_pair(instance, key);
    for (const auto& bf : bids) {
      check_entry(bf.bid, bf.fraction);
      r.obtained[key.campaign] += bf.fraction * instance.group(key.group).curve.eval(bf.bid);
      r.group_fraction[key.group] += bf.fraction;
    }
  }
  finish_report(r);
  return r;
}

}  // namespace bidopt
