#include "transport.hpp"

#include <algorithm>
#include <limits>
#include <queue>

namespace bidopt::detail {

namespace {

class Dinic {
 public:
  Dinic(std::size_t n, double eps) : adj_(n), level_(n), iter_(n), eps_(eps) {}

  std::size_t add_edge(std::size_t from, std::size_t to, double cap) {
    adj_[from].push_back(edges_.size());
    edges_.push_back({to, cap});
    adj_[to].push_back(edges_.size());
    edges_.push_back({from, 0.0});
    return edges_.size() - 2;
  }

  double run(std::size_t s, std::size_t t) {
    double total = 0.0;
    while (bfs(s, t)) {
      std::fill(iter_.begin(), iter_.end(), 0);
      for (;;) {
        double f = dfs(s, t, std::numeric_limits<double>::infinity());
        if (f <= eps_) break;
        total += f;
      }
    }
    return total;
  }

  void raise(std::size_t e, double delta) { edges_[e].cap += delta; }

  // Flow on the forward edge with index `e` as returned by add_edge.
  double flow(std::size_t e) const { return edges_[e ^ 1].cap; }

  std::vector<bool> reachable(std::size_t s) const {
    std::vector<bool> seen(adj_.size(), false);
    std::vector<std::size_t> stack{s};
    seen[s] = true;
    while (!stack.empty()) {
      auto v = stack.back();
      stack.pop_back();
      for (auto e : adj_[v]) {
        const auto& ed = edges_[e];
        if (ed.cap > eps_ && !seen[ed.to]) {
          seen[ed.to] = true;
          stack.push_back(ed.to);
        }
      }
    }
    return seen;
  }

 private:
  struct Edge {
    std::size_t to;
    double cap;
  };

  bool bfs(std::size_t s, std::size_t t) {
    std::fill(level_.begin(), level_.end(), -1);
    std::queue<std::size_t> q;
    level_[s] = 0;
    q.push(s);
    while (!q.empty()) {
      auto v = q.front();
      q.pop();
      for (auto e : adj_[v]) {
        const auto& ed = edges_[e];
        if (ed.cap > eps_ && level_[ed.to] < 0) {
          level_[ed.to] = level_[v] + 1;
          q.push(ed.to);
        }
      }
    }
    return level_[t] >= 0;
  }

  double dfs(std::size_t v, std::size_t t, double pushed) {
    if (v == t) return pushed;
    for (auto& i = iter_[v]; i < adj_[v].size(); ++i) {
      auto e = adj_[v][i];
      auto& ed = edges_[e];
      if (ed.cap <= eps_ || level_[ed.to] != level_[v] + 1) continue;
      double d = dfs(ed.to, t, std::min(pushed, ed.cap));
      if (d > eps_) {
        ed.cap -= d;
        edges_[e ^ 1].cap += d;
        return d;
      }
    }
    return 0.0;
  }

  std::vector<std::vector<std::size_t>> adj_;
  std::vector<Edge> edges_;
  std::vector<int> level_;
  std::vector<std::size_t> iter_;
  double eps_;
};

}  // namespace

TransportResult max_transport(const TransportProblem& problem, double eps,
                              const std::vector<double>* first_phase) {
  const std::size_t m = problem.demand.size();
  const std::size_t n = problem.capacity.size();
  const std::size_t s = m + n;
  const std::size_t t = s + 1;
  Dinic g(m + n + 2, eps);
  for (std::size_t i = 0; i < m; ++i) g.add_edge(s, i, problem.demand[i]);
  std::vector<std::size_t> sink_edges;
  for (std::size_t j = 0; j < n; ++j) {
    double cap = problem.capacity[j];
    if (first_phase) cap = std::clamp((*first_phase)[j], 0.0, cap);
    sink_edges.push_back(g.add_edge(m + j, t, cap));
  }
  std::vector<std::size_t> ids;
  const double inf = std::numeric_limits<double>::infinity();
  for (auto [i, j] : problem.edges) ids.push_back(g.add_edge(i, m + j, inf));

  TransportResult out;
  out.flow = g.run(s, t);
  if (first_phase) {
    // Augmenting paths never cancel flow on edges into the sink, so the
    // second phase keeps every group at or above its first-phase level.
    for (std::size_t j = 0; j < n; ++j)
      g.raise(sink_edges[j], problem.capacity[j] - std::clamp((*first_phase)[j], 0.0, problem.capacity[j]));
    out.flow += g.run(s, t);
  }
  for (auto e : ids) out.edge_flow.push_back(g.flow(e));
  auto seen = g.reachable(s);
  out.deficient.assign(seen.begin(), seen.begin() + static_cast<std::ptrdiff_t>(m));
  return out;
}

}  // namespace bidopt::detail
