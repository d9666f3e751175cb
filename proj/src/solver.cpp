#include "bidopt/solver.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>

#include "bidopt/errors.hpp"
#include "residual_qp.hpp"
#include "transport.hpp"

namespace bidopt {

namespace {

std::vector<std::string> campaign_ids(const ProblemInstance& inst, std::span<const std::size_t> cs) {
  std::vector<std::string> out;
  for (auto i : cs) out.push_back(inst.campaign(i).id);
  return out;
}

std::string join(const std::vector<std::string>& ids) {
  std::string s;
  for (std::size_t k = 0; k < ids.size(); ++k) s += (k ? ", " : "") + ids[k];
  return s;
}

double demand_of(const ProblemInstance& inst, std::span<const std::size_t> cs) {
  double s = 0.0;
  for (auto i : cs) s += inst.campaign(i).impressions;
  return s;
}

bool contains(const std::vector<std::size_t>& sorted, std::size_t x) {
  return std::binary_search(sorted.begin(), sorted.end(), x);
}

// Admissible (campaign, group) pairs inside a subproblem.
std::vector<PairKey> pairs_within(const ProblemInstance& inst, std::span<const std::size_t> cs,
                                  const std::vector<std::size_t>& sorted_groups) {
  std::vector<PairKey> out;
  for (auto i : cs)
    for (auto j : inst.admissible(i))
      if (contains(sorted_groups, j)) out.push_back({i, j});
  return out;
}

std::vector<std::size_t> sorted_copy(std::span<const std::size_t> v) {
  std::vector<std::size_t> out(v.begin(), v.end());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<double> Decomposition::prices() const {
  std::vector<double> out;
  for (const auto& c : components) out.push_back(c.price);
  std::sort(out.begin(), out.end(), std::greater<>());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double price(const ProblemInstance& instance, std::span<const std::size_t> campaigns,
             std::span<const std::size_t> groups) {
  if (campaigns.empty()) throw DomainError("price needs a non-empty campaign set");
  const double demand = demand_of(instance, campaigns);
  if (!(demand > 0.0)) throw DomainError("price needs positive total demand");
  std::vector<SupplyCurve> curves;
  for (auto j : groups)
    if (!instance.group(j).curve.empty()) curves.push_back(instance.group(j).curve);
  const SupplyCurve agg = curves.empty() ? SupplyCurve{} : aggregate(curves);
  const double cap = agg.max_volume();
  if (demand > cap * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "campaigns {" << join(campaign_ids(instance, campaigns)) << "} need " << demand
       << " impressions but their groups supply at most " << cap;
    throw InfeasibleInstance(os.str(), campaign_ids(instance, campaigns));
  }
  return agg.quantile(std::min(demand, cap));
}

QPSolution alloc(const ProblemInstance& instance, std::span<const std::size_t> campaigns,
                 std::span<const std::size_t> groups, double p, const AllocOptions& options) {
  QPSolution out;
  out.campaigns.assign(campaigns.begin(), campaigns.end());
  out.groups = sorted_copy(groups);
  out.price = p;
  const Tolerances& tol = options.tol;
  const double scale = std::max(demand_of(instance, campaigns), 1e-300);

  std::vector<std::size_t> local_group(instance.num_groups(), SIZE_MAX);
  for (std::size_t k = 0; k < out.groups.size(); ++k) local_group[out.groups[k]] = k;
  std::vector<double> cap(out.groups.size());
  std::vector<double> below(out.groups.size());
  for (std::size_t k = 0; k < out.groups.size(); ++k) {
    const auto& curve = instance.group(out.groups[k]).curve;
    cap[k] = curve.empty() ? 0.0 : curve.eval(p);
    below[k] = curve.empty() ? 0.0 : curve.left_limit(p);
  }

  const auto pairs = pairs_within(instance, campaigns, out.groups);
  for (const auto& key : pairs) out.fractions[key] = 0.0;

  // Edges with zero capacity cannot carry impressions and are left out.
  std::vector<PairKey> edges;
  for (std::size_t c = 0; c < campaigns.size(); ++c)
    for (const auto& key : pairs)
      if (key.campaign == campaigns[c] && cap[local_group[key.group]] > 0.0) edges.push_back(key);
  if (options.reverse_order) std::reverse(edges.begin(), edges.end());

  std::vector<std::size_t> local_campaign(instance.num_campaigns(), SIZE_MAX);
  for (std::size_t c = 0; c < campaigns.size(); ++c) local_campaign[campaigns[c]] = c;

  detail::QpProblem qp;
  detail::TransportProblem tp;
  for (auto i : campaigns) {
    qp.demand.push_back(instance.campaign(i).impressions / scale);
    tp.demand.push_back(instance.campaign(i).impressions);
  }
  for (double c : cap) {
    qp.capacity.push_back(c / scale);
    tp.capacity.push_back(c);
  }
  for (const auto& e : edges) {
    qp.edges.emplace_back(local_campaign[e.campaign], local_group[e.group]);
    tp.edges.emplace_back(local_campaign[e.campaign], local_group[e.group]);
  }

  detail::QpOptions qo;
  qo.target = 1e-2 * tol.done;
  qo.stall = tol.qp;
  qo.max_iterations = tol.max_iterations;
  qo.seed = options.seed;
  qo.init = options.start == QpStart::kZero      ? detail::QpInit::kZero
            : options.start == QpStart::kUniform ? detail::QpInit::kUniform
                                                 : detail::QpInit::kRandom;
  const auto sol = detail::solve_residual_qp(qp, qo);
  out.iterations = sol.iterations;
  out.objective_done = sol.objective <= tol.done;

  // Feasibility of the subproblem is a combinatorial fact; decide it with a
  // max-flow. Groups are first filled up to their left limit so that, when
  // the subproblem is done, each group serves at least D_j^-(p) if possible.
  const double flow_eps = tol.flow * scale;
  const auto flow = detail::max_transport(tp, flow_eps, &below);
  const double slack = flow_eps * static_cast<double>(campaigns.size() + out.groups.size() + 1);
  out.done = flow.flow >= scale - slack;

  std::vector<double> x(edges.size());
  if (out.done) {
    x = flow.edge_flow;
  } else {
    for (std::size_t e = 0; e < edges.size(); ++e) x[e] = sol.x[e] * scale;
  }
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const double c = cap[local_group[edges[e].group]];
    out.fractions[edges[e]] = std::clamp(x[e] / c, 0.0, 1.0);
  }

  out.received.assign(campaigns.size(), 0.0);
  for (const auto& [key, t] : out.fractions)
    out.received[local_campaign[key.campaign]] += t * cap[local_group[key.group]];
  out.objective = 0.0;
  for (std::size_t c = 0; c < campaigns.size(); ++c) {
    double d = instance.campaign(campaigns[c]).impressions - out.received[c];
    out.objective += d * d;
    out.residuals.push_back(d < tol.residual * scale ? 0.0 : d);
  }

  if (!out.done) {
    std::vector<std::size_t> from_qp;
    std::vector<std::size_t> from_cut;
    for (std::size_t c = 0; c < campaigns.size(); ++c) {
      if (out.residuals[c] > 0.0) from_qp.push_back(campaigns[c]);
      if (flow.deficient[c]) from_cut.push_back(campaigns[c]);
    }
    std::sort(from_qp.begin(), from_qp.end());
    std::sort(from_cut.begin(), from_cut.end());
    out.residual_set_matches_cut = from_qp == from_cut;
    out.deficient = out.residual_set_matches_cut ? from_qp : from_cut;
  }
  return out;
}

SplitResult split(const ProblemInstance& instance, const QPSolution& qp) {
  if (qp.done) throw DomainError("split called on a subproblem that is already done");
  SplitResult out;
  out.deficient.campaigns = qp.deficient;
  std::set<std::size_t> g1;
  for (auto i : qp.deficient)
    for (auto j : instance.admissible(i))
      if (contains(qp.groups, j)) g1.insert(j);
  out.deficient.groups.assign(g1.begin(), g1.end());
  for (auto i : qp.campaigns)
    if (!contains(qp.deficient, i)) out.rest.campaigns.push_back(i);
  for (auto j : qp.groups)
    if (!g1.contains(j)) out.rest.groups.push_back(j);
  std::sort(out.rest.campaigns.begin(), out.rest.campaigns.end());
  if (out.deficient.campaigns.empty() || out.rest.campaigns.empty()) {
    const auto& who = qp.deficient.empty() ? qp.campaigns : qp.deficient;
    std::vector<std::string> ids;
    for (auto i : who) ids.push_back(instance.campaign(i).id);
    throw InfeasibleInstance("no feasible split for campaigns {" + join(ids) + "}", ids);
  }
  return out;
}

namespace {

struct Recursion {
  const ProblemInstance& inst;
  const SolverOptions& opt;
  Decomposition& out;

  std::vector<std::size_t> run(const std::vector<std::size_t>& cs, const std::vector<std::size_t>& gs,
                               std::size_t depth) {
    out.max_depth = std::max(out.max_depth, depth);
    if (depth > inst.num_campaigns()) throw Error("recursion depth exceeded the number of campaigns");
    const double p = price(inst, cs, gs);
    AllocOptions ao;
    ao.tol = opt.tol;
    auto qp = alloc(inst, cs, gs, p, ao);
    if (qp.objective_done != qp.done) ++out.objective_flag_overrides;
    if (qp.done) {
      Component c;
      c.campaigns = sorted_copy(cs);
      c.groups = qp.groups;
      c.price = p;
      c.fractions = std::move(qp.fractions);
      out.components.push_back(std::move(c));
      return {out.components.size() - 1};
    }
    if (!qp.residual_set_matches_cut) ++out.residual_set_overrides;
    auto parts = split(inst, qp);
    SplitRecord rec;
    rec.price = p;
    rec.deficient_side = run(parts.deficient.campaigns, parts.deficient.groups, depth + 1);
    rec.rest_side = run(parts.rest.campaigns, parts.rest.groups, depth + 1);
    std::vector<std::size_t> all = rec.deficient_side;
    all.insert(all.end(), rec.rest_side.begin(), rec.rest_side.end());
    out.splits.push_back(std::move(rec));
    return all;
  }
};

}  // namespace

Decomposition decompose(const ProblemInstance& instance, const SolverOptions& options) {
  Decomposition out;
  if (instance.num_campaigns() == 0) return out;
  std::vector<std::size_t> cs(instance.num_campaigns());
  std::vector<std::size_t> gs(instance.num_groups());
  std::iota(cs.begin(), cs.end(), 0);
  std::iota(gs.begin(), gs.end(), 0);

  // Whole-instance feasibility at unbounded bids.
  detail::TransportProblem tp;
  for (const auto& c : instance.campaigns()) tp.demand.push_back(c.impressions);
  for (const auto& g : instance.groups()) tp.capacity.push_back(g.curve.max_volume());
  for (auto i : cs)
    for (auto j : instance.admissible(i)) tp.edges.emplace_back(i, j);
  const double total = instance.total_demand();
  const double eps = options.tol.flow * total;
  const auto flow = detail::max_transport(tp, eps);
  if (flow.flow < total - eps * static_cast<double>(cs.size() + gs.size() + 1)) {
    std::vector<std::string> ids;
    for (auto i : cs)
      if (flow.deficient[i]) ids.push_back(instance.campaign(i).id);
    std::ostringstream os;
    os << "infeasible: campaigns {" << join(ids) << "} cannot be served by the supply of their groups"
       << " (max total " << flow.flow << " of " << total << " impressions)";
    throw InfeasibleInstance(os.str(), ids);
  }

  Recursion rec{instance, options, out};
  rec.run(cs, gs, 0);
  return out;
}

PureAllocation build_allocation([[maybe_unused]] const ProblemInstance& instance,
                                const Decomposition& d) {
  PureAllocation out;
  for (const auto& c : d.components)
    for (const auto& [key, t] : c.fractions) out[key] = PureEntry{c.price, t};
  return out;
}

double component_lower_bound(const Component& c, const ProblemInstance& instance) {
  double lb = demand_of(instance, c.campaigns) * c.price;
  for (auto j : c.groups) lb -= instance.group(j).curve.integral(c.price);
  return lb;
}

double lower_bound(const Decomposition& d, const ProblemInstance& instance) {
  double lb = 0.0;
  for (const auto& c : d.components) lb += component_lower_bound(c, instance);
  return lb;
}

double gap_bound(const Decomposition& d, const ProblemInstance& instance) {
  double gap = 0.0;
  for (const auto& c : d.components)
    for (auto j : c.groups) {
      const auto& curve = instance.group(j).curve;
      const double v = curve.eval(c.price);
      if (v <= 0.0) continue;
      gap += (v - curve.left_limit(c.price)) / v * curve.integral(c.price);
    }
  return gap;
}

MixedResult build_mixed(const ProblemInstance& instance, const Decomposition& d,
                        const B1Choice& choice) {
  if (choice.kind == B1Choice::Kind::kPerComponent &&
      choice.per_component.size() != d.components.size())
    throw DomainError("per-component b1 list must have one bid per component");
  if (choice.kind == B1Choice::Kind::kRelativeDelta && !(choice.delta > 0.0 && choice.delta <= 1.0))
    throw DomainError("relative delta must lie in (0, 1]");

  MixedResult out;
  for (std::size_t k = 0; k < d.components.size(); ++k) {
    const auto& comp = d.components[k];
    const double p = comp.price;
    MixedComponentReport rep;
    rep.price = p;
    rep.lower_bound = component_lower_bound(comp, instance);

    double common_b1 = -1.0;
    if (choice.kind == B1Choice::Kind::kRelativeDelta) common_b1 = p * (1.0 - choice.delta);
    if (choice.kind == B1Choice::Kind::kPerComponent) common_b1 = choice.per_component[k];
    if (choice.kind != B1Choice::Kind::kAutomatic) {
      if (!(common_b1 >= 0.0)) throw DomainError("b1 must be non-negative");
      if (common_b1 >= p - kBidTolerance) throw DomainError("b1 must lie strictly below the component price");
    }

    for (auto j : comp.groups) {
      const auto& curve = instance.group(j).curve;
      std::vector<std::pair<std::size_t, double>> users;
      double s = 0.0;
      for (const auto& [key, t] : comp.fractions)
        if (key.group == j && t > 0.0) {
          users.emplace_back(key.campaign, t);
          s += t;
        }
      MixedGroupNote note;
      note.group = j;
      if (users.empty()) {
        note.pure_reason = "unused";
        note.excess = curve.integral(p);
        rep.analytic_excess += note.excess;
        rep.groups.push_back(note);
        continue;
      }
      const double dp = curve.eval(p);
      double b1 = common_b1;
      if (choice.kind == B1Choice::Kind::kAutomatic) {
        b1 = p > 0.0 ? curve.flat_region_start(p) : -1.0;
        if (b1 >= p - kBidTolerance) b1 = -1.0;
      }
      const double db1 = b1 >= 0.0 ? curve.eval(b1) : 0.0;
      double a = 0.0;
      if (b1 < 0.0) {
        note.pure_reason = "curve not flat below price";
      } else if (s >= 1.0) {
        note.pure_reason = "group fully used";
      } else if (dp - db1 <= 0.0) {
        note.pure_reason = "no jump between b1 and price";
      } else if (db1 <= 0.0) {
        note.pure_reason = "no supply at b1";
      } else {
        a = (1.0 - s) * dp / (dp - db1);
        if (a > 1.0 + 1e-12) {
          note.pure_reason = "supply at b1 exceeds the group's used share";
          a = 0.0;
        }
        a = std::min(a, 1.0);
      }
      note.b1 = b1 >= 0.0 ? b1 : 0.0;
      note.share_b1 = a;
      if (note.pure_reason.empty()) {
        note.excess = a * (curve.integral(p) - curve.integral(b1) - db1 * (p - b1));
        for (auto [i, t] : users) {
          const double f1 = t / s * a;
          const double fp = t / s - f1;
          auto& bids = out.strategy[{i, j}];
          if (f1 > 0.0) bids.push_back({b1, f1});
          if (fp > 0.0) bids.push_back({p, fp});
        }
      } else {
        note.excess = (1.0 - std::min(s, 1.0)) * curve.integral(p);
        for (auto [i, t] : users) out.strategy[{i, j}].push_back({p, t});
      }
      rep.analytic_excess += note.excess;
      rep.groups.push_back(note);
    }

    MixedStrategy part;
    for (const auto& [key, bids] : out.strategy)
      if (std::binary_search(comp.campaigns.begin(), comp.campaigns.end(), key.campaign) &&
          std::binary_search(comp.groups.begin(), comp.groups.end(), key.group))
        part[key] = bids;
    rep.cost = mixed_cost(instance, part);
    out.lower_bound += rep.lower_bound;
    out.components.push_back(std::move(rep));
  }
  out.cost = mixed_cost(instance, out.strategy);
  return out;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::kVerifiedOptimal: return "verified_optimal";
    case Verdict::kConditionsNotMet: return "conditions_not_met";
    case Verdict::kNotApplicable: return "not_applicable";
    case Verdict::kNotComponentStructured: return "not_component_structured";
  }
  return "unknown";
}

VerificationReport verify_sufficient(const ProblemInstance& instance, const PureAllocation& alloc) {
  VerificationReport rep;
  rep.curves_continuous = instance.all_continuous();
  const std::size_t nc = instance.num_campaigns();
  const std::size_t ng = instance.num_groups();

  // Pairs that actually win impressions define the component structure.
  std::vector<double> bid_of(nc, -1.0);
  std::vector<std::vector<std::size_t>> used_by(nc);
  std::vector<bool> group_used(ng, false);
  std::vector<double> obtained(nc, 0.0);
  for (const auto& [key, e] : alloc) {
    if (!instance.is_admissible(key.campaign, key.group))
      throw DomainError("allocation entry for an inadmissible pair");
    const double won = e.fraction * instance.group(key.group).curve.eval(e.bid);
    if (!(won > 0.0)) continue;
    obtained[key.campaign] += won;
    auto& b = bid_of[key.campaign];
    if (b >= 0.0 && std::abs(b - e.bid) > kBidTolerance) {
      rep.verdict = Verdict::kNotComponentStructured;
      rep.detail = "campaign '" + instance.campaign(key.campaign).id + "' bids more than one value";
      return rep;
    }
    b = e.bid;
    used_by[key.campaign].push_back(key.group);
    group_used[key.group] = true;
  }

  // Connected components of the usage graph.
  std::vector<std::size_t> comp_of_campaign(nc, SIZE_MAX);
  std::vector<std::size_t> comp_of_group(ng, SIZE_MAX);
  std::vector<double> comp_price;
  for (std::size_t i0 = 0; i0 < nc; ++i0) {
    if (comp_of_campaign[i0] != SIZE_MAX || used_by[i0].empty()) continue;
    const std::size_t id = comp_price.size();
    comp_price.push_back(bid_of[i0]);
    std::vector<std::size_t> stack{i0};
    comp_of_campaign[i0] = id;
    while (!stack.empty()) {
      auto i = stack.back();
      stack.pop_back();
      if (std::abs(bid_of[i] - comp_price[id]) > kBidTolerance) {
        rep.verdict = Verdict::kNotComponentStructured;
        rep.detail = "a connected set of campaigns and groups uses more than one price";
        return rep;
      }
      for (auto j : used_by[i]) {
        if (comp_of_group[j] != SIZE_MAX) continue;
        comp_of_group[j] = id;
        for (auto i2 : instance.eligible(j)) {
          if (comp_of_campaign[i2] != SIZE_MAX) continue;
          if (std::find(used_by[i2].begin(), used_by[i2].end(), j) == used_by[i2].end()) continue;
          comp_of_campaign[i2] = id;
          stack.push_back(i2);
        }
      }
    }
  }
  rep.prices = comp_price;

  rep.demand_exact = true;
  for (std::size_t i = 0; i < nc; ++i) {
    const double need = instance.campaign(i).impressions;
    if (std::abs(obtained[i] - need) > kFeasibilityTolerance * need) rep.demand_exact = false;
  }

  rep.supply_equals = true;
  for (std::size_t k = 0; k < comp_price.size(); ++k) {
    double supply = 0.0;
    double demand = 0.0;
    for (std::size_t j = 0; j < ng; ++j)
      if (comp_of_group[j] == k) supply += instance.group(j).curve.eval(comp_price[k]);
    for (std::size_t i = 0; i < nc; ++i)
      if (comp_of_campaign[i] == k) demand += instance.campaign(i).impressions;
    if (std::abs(supply - demand) > kFeasibilityTolerance * std::max(demand, 1.0))
      rep.supply_equals = false;
  }

  rep.unused_zero_below = true;
  rep.no_cheaper_access = true;
  for (std::size_t i = 0; i < nc; ++i) {
    const auto k = comp_of_campaign[i];
    if (k == SIZE_MAX) continue;
    const double p = comp_price[k];
    for (auto j : instance.admissible(i)) {
      if (!group_used[j]) {
        if (instance.group(j).curve.left_limit(p) > 0.0) rep.unused_zero_below = false;
      } else if (comp_price[comp_of_group[j]] < p - kBidTolerance) {
        rep.no_cheaper_access = false;
      }
    }
  }

  const bool all = rep.demand_exact && rep.supply_equals && rep.unused_zero_below && rep.no_cheaper_access;
  if (!rep.curves_continuous) {
    rep.verdict = Verdict::kNotApplicable;
    rep.detail = "supply curves are discontinuous";
  } else {
    rep.verdict = all ? Verdict::kVerifiedOptimal : Verdict::kConditionsNotMet;
  }
  return rep;
}

}  // namespace bidopt
