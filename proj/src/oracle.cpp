#include "bidopt/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <queue>

#include "bidopt/errors.hpp"

namespace bidopt {

namespace {

struct Unit {
  int k = 0;
  double imp = 0.0;
  double cost = 0.0;
  std::vector<BidFraction> bids;
};

struct GroupOption {
  std::vector<double> imp;  // aligned with eligible(j)
  double cost = 0.0;
  std::vector<std::size_t> units;  // chosen unit per eligible campaign
};

std::vector<double> bid_grid(const ProblemInstance& inst, std::size_t j, const GridSpec& spec) {
  const auto& curve = inst.group(j).curve;
  std::vector<double> g;
  const auto bids = curve.bids();
  for (std::size_t k = 0; k < bids.size(); ++k) {
    g.push_back(bids[k]);
    if (k + 1 < bids.size())
      for (int s = 1; s < spec.subdivisions; ++s)
        g.push_back(bids[k] + (bids[k + 1] - bids[k]) * s / spec.subdivisions);
  }
  if (j < spec.extra_bids.size())
    for (double b : spec.extra_bids[j])
      if (b >= 0.0) g.push_back(b);
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end(),
                      [](double a, double b) { return std::abs(a - b) <= kBidTolerance; }),
          g.end());
  // Bids that win nothing are never useful.
  std::erase_if(g, [&](double b) { return !(curve.eval(b) > 0.0); });
  return g;
}

// Drops units dominated by another unit using no more of the group, at least
// as many (capped) impressions, and no more cost.
std::vector<Unit> prune_units(std::vector<Unit> units) {
  std::sort(units.begin(), units.end(), [](const Unit& a, const Unit& b) {
    if (a.cost != b.cost) return a.cost < b.cost;
    if (a.k != b.k) return a.k < b.k;
    return a.imp > b.imp;
  });
  std::vector<Unit> kept;
  for (auto& u : units) {
    bool dominated = false;
    for (const auto& v : kept)
      if (v.k <= u.k && v.imp >= u.imp) {
        dominated = true;
        break;
      }
    if (!dominated) kept.push_back(std::move(u));
  }
  return kept;
}

std::vector<Unit> units_for(const ProblemInstance& inst, std::size_t i, std::size_t j,
                            const std::vector<double>& grid, int q, int bids_per_pair) {
  const auto& curve = inst.group(j).curve;
  const double need = inst.campaign(i).impressions;
  std::vector<Unit> units;
  units.push_back({});
  std::vector<double> vol, wc;
  for (double b : grid) {
    vol.push_back(curve.eval(b));
    wc.push_back(curve.win_cost(b));
  }
  const double dq = static_cast<double>(q);
  for (std::size_t a = 0; a < grid.size(); ++a)
    for (int k = 1; k <= q; ++k) {
      const double f = k / dq;
      units.push_back({k, std::min(need, f * vol[a]), f * wc[a], {{grid[a], f}}});
    }
  if (bids_per_pair >= 2) {
    for (std::size_t a = 0; a < grid.size(); ++a)
      for (std::size_t c = a + 1; c < grid.size(); ++c)
        for (int k1 = 1; k1 < q; ++k1)
          for (int k2 = 1; k1 + k2 <= q; ++k2) {
            const double f1 = k1 / dq;
            const double f2 = k2 / dq;
            units.push_back({k1 + k2, std::min(need, f1 * vol[a] + f2 * vol[c]),
                             f1 * wc[a] + f2 * wc[c], {{grid[a], f1}, {grid[c], f2}}});
          }
  }
  return prune_units(std::move(units));
}

bool dominates(const std::vector<double>& a_imp, double a_cost, const std::vector<double>& b_imp,
               double b_cost) {
  if (a_cost > b_cost) return false;
  for (std::size_t k = 0; k < a_imp.size(); ++k)
    if (a_imp[k] < b_imp[k]) return false;
  return true;
}

template <class T, class ImpOf>
void pareto_prune(std::vector<T>& items, ImpOf imp_of, std::size_t limit = 20000) {
  if (items.size() > limit) return;
  std::sort(items.begin(), items.end(), [](const T& a, const T& b) { return a.cost < b.cost; });
  std::vector<T> kept;
  for (auto& it : items) {
    bool dom = false;
    for (const auto& k : kept)
      if (dominates(imp_of(k), k.cost, imp_of(it), it.cost)) {
        dom = true;
        break;
      }
    if (!dom) kept.push_back(std::move(it));
  }
  items = std::move(kept);
}

struct Search {
  const ProblemInstance& inst;
  const GridSpec& spec;
  int bids_per_pair;
  double searched = 0.0;

  void charge(double n) {
    searched += n;
    if (searched > spec.max_states) throw OracleCapExceeded(searched, spec.max_states);
  }

  std::vector<GroupOption> group_options(std::size_t j, const std::vector<std::vector<Unit>>& units) {
    const auto& elig = inst.eligible(j);
    const int q = spec.gamma_steps;
    std::map<std::vector<double>, GroupOption> best;
    GroupOption cur;
    cur.imp.assign(elig.size(), 0.0);
    cur.units.assign(elig.size(), 0);
    auto rec = [&](auto&& self, std::size_t pos, int left) -> void {
      if (pos == elig.size()) {
        charge(1.0);
        auto it = best.find(cur.imp);
        if (it == best.end() || cur.cost < it->second.cost) best[cur.imp] = cur;
        return;
      }
      const auto& us = units[pos];
      for (std::size_t u = 0; u < us.size(); ++u) {
        if (us[u].k > left) continue;
        cur.imp[pos] = us[u].imp;
        cur.units[pos] = u;
        cur.cost += us[u].cost;
        self(self, pos + 1, left - us[u].k);
        cur.cost -= us[u].cost;
      }
      cur.imp[pos] = 0.0;
    };
    rec(rec, 0, q);
    std::vector<GroupOption> out;
    for (auto& [k, v] : best) out.push_back(std::move(v));
    pareto_prune(out, [](const GroupOption& o) -> const std::vector<double>& { return o.imp; });
    return out;
  }

  OracleResult run() {
    if (spec.gamma_steps < 1 || spec.gamma_steps > 50)
      throw DomainError("gamma_steps must lie in [1, 50]");
    if (spec.subdivisions < 1) throw DomainError("subdivisions must be at least 1");
    OracleResult res;
    const std::size_t nc = inst.num_campaigns();
    const std::size_t ng = inst.num_groups();
    for (std::size_t j = 0; j < ng; ++j) {
      const auto& c = inst.group(j).curve;
      if (!c.empty()) res.slack += c.win_cost(c.bids().back());
    }
    res.slack /= spec.gamma_steps;
    if (nc == 0) {
      res.feasible = true;
      return res;
    }

    // Unit options per (group, eligible campaign) and an a-priori size check.
    std::vector<std::vector<std::vector<Unit>>> units(ng);
    double estimate = 0.0;
    for (std::size_t j = 0; j < ng; ++j) {
      const auto grid = bid_grid(inst, j, spec);
      double prod = 1.0;
      for (auto i : inst.eligible(j)) {
        units[j].push_back(units_for(inst, i, j, grid, spec.gamma_steps, bids_per_pair));
        prod *= static_cast<double>(units[j].back().size());
      }
      estimate += prod;
    }
    if (estimate > spec.max_states) throw OracleCapExceeded(estimate, spec.max_states);

    struct State {
      std::vector<double> imp;
      double cost = 0.0;
      std::vector<std::size_t> choice;  // option index per processed group
    };
    std::vector<State> states{{std::vector<double>(nc, 0.0), 0.0, {}}};
    std::vector<std::vector<GroupOption>> options(ng);
    for (std::size_t j = 0; j < ng; ++j) {
      options[j] = group_options(j, units[j]);
      charge(static_cast<double>(states.size()) * static_cast<double>(options[j].size()));
      std::map<std::vector<double>, State> merged;
      const auto& elig = inst.eligible(j);
      for (const auto& s : states)
        for (std::size_t o = 0; o < options[j].size(); ++o) {
          const auto& opt = options[j][o];
          State n{s.imp, s.cost + opt.cost, s.choice};
          for (std::size_t k = 0; k < elig.size(); ++k)
            n.imp[elig[k]] = std::min(inst.campaign(elig[k]).impressions, n.imp[elig[k]] + opt.imp[k]);
          n.choice.push_back(o);
          auto it = merged.find(n.imp);
          if (it == merged.end() || n.cost < it->second.cost) merged[n.imp] = std::move(n);
        }
      states.clear();
      for (auto& [k, v] : merged) states.push_back(std::move(v));
      pareto_prune(states, [](const State& s) -> const std::vector<double>& { return s.imp; }, 5000);
    }

    const State* best = nullptr;
    for (const auto& s : states) {
      bool ok = true;
      for (std::size_t i = 0; i < nc; ++i) {
        const double need = inst.campaign(i).impressions;
        if (s.imp[i] < need - kFeasibilityTolerance * need) ok = false;
      }
      if (ok && (!best || s.cost < best->cost)) best = &s;
    }
    res.states_searched = searched;
    if (!best) return res;
    res.feasible = true;
    for (std::size_t j = 0; j < ng; ++j) {
      const auto& opt = options[j][best->choice[j]];
      const auto& elig = inst.eligible(j);
      for (std::size_t k = 0; k < elig.size(); ++k) {
        const auto& u = units[j][k][opt.units[k]];
        if (u.k == 0) continue;
        auto& bids = res.strategy[{elig[k], j}];
        bids.insert(bids.end(), u.bids.begin(), u.bids.end());
      }
    }
    res.cost = mixed_cost(inst, res.strategy);
    return res;
  }
};

}  // namespace

OracleResult grid_pure_optimum(const ProblemInstance& instance, const GridSpec& spec) {
  Search s{instance, spec, 1};
  auto res = s.run();
  for (const auto& [key, bids] : res.strategy) res.allocation[key] = {bids.front().bid, bids.front().fraction};
  res.strategy.clear();
  if (res.feasible) res.cost = pure_cost(instance, res.allocation);
  return res;
}

OracleResult grid_mixed_cost(const ProblemInstance& instance, const GridSpec& spec, int bids_per_pair) {
  if (bids_per_pair < 1 || bids_per_pair > 2) throw DomainError("bids_per_pair must be 1 or 2");
  Search s{instance, spec, bids_per_pair};
  return s.run();
}

namespace {

// Edmonds-Karp on integer capacities.
std::int64_t edmonds_karp(std::vector<std::vector<std::int64_t>> cap, std::size_t s, std::size_t t) {
  const std::size_t n = cap.size();
  std::int64_t total = 0;
  for (;;) {
    std::vector<std::size_t> parent(n, SIZE_MAX);
    parent[s] = s;
    std::queue<std::size_t> q;
    q.push(s);
    while (!q.empty() && parent[t] == SIZE_MAX) {
      auto v = q.front();
      q.pop();
      for (std::size_t w = 0; w < n; ++w)
        if (parent[w] == SIZE_MAX && cap[v][w] > 0) {
          parent[w] = v;
          q.push(w);
        }
    }
    if (parent[t] == SIZE_MAX) return total;
    std::int64_t push = std::numeric_limits<std::int64_t>::max();
    for (auto v = t; v != s; v = parent[v]) push = std::min(push, cap[parent[v]][v]);
    for (auto v = t; v != s; v = parent[v]) {
      cap[parent[v]][v] -= push;
      cap[v][parent[v]] += push;
    }
    total += push;
  }
}

double edmonds_karp_real(std::vector<std::vector<double>> cap, std::size_t s, std::size_t t, double eps) {
  const std::size_t n = cap.size();
  double total = 0.0;
  for (;;) {
    std::vector<std::size_t> parent(n, SIZE_MAX);
    parent[s] = s;
    std::queue<std::size_t> q;
    q.push(s);
    while (!q.empty() && parent[t] == SIZE_MAX) {
      auto v = q.front();
      q.pop();
      for (std::size_t w = 0; w < n; ++w)
        if (parent[w] == SIZE_MAX && cap[v][w] > eps) {
          parent[w] = v;
          q.push(w);
        }
    }
    if (parent[t] == SIZE_MAX) return total;
    double push = std::numeric_limits<double>::infinity();
    for (auto v = t; v != s; v = parent[v]) push = std::min(push, cap[parent[v]][v]);
    for (auto v = t; v != s; v = parent[v]) {
      cap[parent[v]][v] -= push;
      cap[v][parent[v]] += push;
    }
    total += push;
  }
}

// Smallest power of ten making every value an integer, if one exists below 1e9.
bool decimal_scale(const std::vector<double>& values, double& scale) {
  for (int k = 0; k <= 9; ++k) {
    const double s = std::pow(10.0, k);
    bool ok = true;
    for (double v : values) {
      const double x = v * s;
      // The snap tolerance is relative to v, not to the scaled value.
      if (x > 9e15 || std::abs(x - std::round(x)) > 1e-12 * std::max(1.0, std::abs(v)) * s) {
        ok = false;
        break;
      }
    }
    if (ok) {
      scale = s;
      return true;
    }
  }
  return false;
}

}  // namespace

MaxflowReport maxflow_check(const ProblemInstance& instance, std::span<const std::size_t> campaigns,
                            std::span<const std::size_t> groups, double p) {
  MaxflowReport rep;
  const std::size_t m = campaigns.size();
  const std::size_t n = groups.size();
  const std::size_t s = m + n;
  const std::size_t t = s + 1;
  std::vector<double> demand, supply;
  for (auto i : campaigns) demand.push_back(instance.campaign(i).impressions);
  for (auto j : groups) {
    const auto& c = instance.group(j).curve;
    supply.push_back(c.empty() ? 0.0 : c.eval(p));
  }
  for (double d : demand) rep.demand += d;

  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < n; ++b)
      if (instance.is_admissible(campaigns[a], groups[b])) edges.emplace_back(a, b);

  std::vector<double> all = demand;
  all.insert(all.end(), supply.begin(), supply.end());
  double scale = 1.0;
  if (decimal_scale(all, scale)) {
    std::vector<std::vector<std::int64_t>> cap(t + 1, std::vector<std::int64_t>(t + 1, 0));
    std::int64_t need = 0;
    std::int64_t big = 0;
    for (std::size_t a = 0; a < m; ++a) {
      cap[s][a] = static_cast<std::int64_t>(std::llround(demand[a] * scale));
      need += cap[s][a];
    }
    for (std::size_t b = 0; b < n; ++b) {
      cap[m + b][t] = static_cast<std::int64_t>(std::llround(supply[b] * scale));
      big += cap[m + b][t];
    }
    for (auto [a, b] : edges) cap[a][m + b] = big + need + 1;
    const auto f = edmonds_karp(std::move(cap), s, t);
    rep.exact = true;
    rep.feasible = f == need;
    rep.max_flow = static_cast<double>(f) / scale;
    return rep;
  }
  std::vector<std::vector<double>> cap(t + 1, std::vector<double>(t + 1, 0.0));
  for (std::size_t a = 0; a < m; ++a) cap[s][a] = demand[a];
  for (std::size_t b = 0; b < n; ++b) cap[m + b][t] = supply[b];
  for (auto [a, b] : edges) cap[a][m + b] = std::numeric_limits<double>::infinity();
  const double eps = 1e-12 * std::max(rep.demand, 1.0);
  rep.max_flow = edmonds_karp_real(std::move(cap), s, t, eps);
  rep.feasible = rep.max_flow >= rep.demand - eps * static_cast<double>(m + n + 1);
  return rep;
}

bool maxflow_feasible(const ProblemInstance& instance, std::span<const std::size_t> campaigns,
                      std::span<const std::size_t> groups, double p) {
  return maxflow_check(instance, campaigns, groups, p).feasible;
}

}  // namespace bidopt
