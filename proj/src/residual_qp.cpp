#include "residual_qp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

namespace bidopt::detail {

void project_capped_simplex(std::vector<double>& v, double cap) {
  double sum = 0.0;
  for (auto& x : v) {
    x = std::max(x, 0.0);
    sum += x;
  }
  if (sum <= cap) return;
  std::vector<double> u = v;
  std::sort(u.begin(), u.end(), std::greater<>());
  double run = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    run += u[k];
    const double th = (run - cap) / static_cast<double>(k + 1);
    if (k + 1 == u.size() || u[k + 1] <= th) {
      theta = th;
      break;
    }
  }
  for (auto& x : v) x = std::max(x - theta, 0.0);
}

namespace {

struct Layout {
  std::vector<std::vector<std::size_t>> by_group;
  std::vector<std::size_t> degree;
};

double objective(const QpProblem& p, const std::vector<double>& x, std::vector<double>& resid) {
  resid = p.demand;
  for (std::size_t e = 0; e < x.size(); ++e) resid[p.edges[e].first] -= x[e];
  double f = 0.0;
  for (double r : resid) f += r * r;
  return f;
}

void project(const QpProblem& p, const Layout& lay, std::vector<double>& x) {
  std::vector<double> buf;
  for (std::size_t j = 0; j < lay.by_group.size(); ++j) {
    const auto& es = lay.by_group[j];
    if (es.empty()) continue;
    buf.resize(es.size());
    for (std::size_t k = 0; k < es.size(); ++k) buf[k] = x[es[k]];
    project_capped_simplex(buf, p.capacity[j]);
    for (std::size_t k = 0; k < es.size(); ++k) x[es[k]] = buf[k];
  }
}

}  // namespace

QpResult solve_residual_qp(const QpProblem& p, const QpOptions& opt) {
  const std::size_t ne = p.edges.size();
  Layout lay;
  lay.by_group.assign(p.capacity.size(), {});
  lay.degree.assign(p.demand.size(), 0);
  for (std::size_t e = 0; e < ne; ++e) {
    lay.by_group[p.edges[e].second].push_back(e);
    ++lay.degree[p.edges[e].first];
  }

  QpResult out;
  std::vector<double> resid;
  out.x.assign(ne, 0.0);
  if (opt.init == QpInit::kUniform) {
    for (std::size_t j = 0; j < lay.by_group.size(); ++j)
      for (auto e : lay.by_group[j])
        out.x[e] = p.capacity[j] / static_cast<double>(lay.by_group[j].size());
  } else if (opt.init == QpInit::kRandom) {
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t j = 0; j < lay.by_group.size(); ++j)
      for (auto e : lay.by_group[j]) out.x[e] = u(rng) * p.capacity[j];
    project(p, lay, out.x);
  }
  out.objective = objective(p, out.x, resid);
  if (ne == 0) return out;

  const std::size_t max_deg = *std::max_element(lay.degree.begin(), lay.degree.end());
  const double step = 1.0 / (2.0 * static_cast<double>(std::max<std::size_t>(1, max_deg)));

  std::vector<double> x = out.x;
  std::vector<double> y = x;
  std::vector<double> x_next(ne);
  double fx = out.objective;
  double t = 1.0;
  double f_checkpoint = fx;
  std::size_t it = 0;
  while (it < opt.max_iterations && fx > opt.target) {
    ++it;
    objective(p, y, resid);
    for (std::size_t e = 0; e < ne; ++e)
      x_next[e] = y[e] + step * 2.0 * resid[p.edges[e].first];
    project(p, lay, x_next);
    const double f_next = objective(p, x_next, resid);
    if (f_next > fx) {
      // Function-value restart: drop momentum and retry from x.
      t = 1.0;
      y = x;
    } else {
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      const double beta = (t - 1.0) / t_next;
      for (std::size_t e = 0; e < ne; ++e) y[e] = x_next[e] + beta * (x_next[e] - x[e]);
      std::swap(x, x_next);
      fx = f_next;
      t = t_next;
    }
    if (it % 50 == 0) {
      if (f_checkpoint - fx <= opt.stall * f_checkpoint) break;
      f_checkpoint = fx;
    }
  }
  out.x = std::move(x);
  out.objective = fx;
  out.iterations = it;
  return out;
}

}  // namespace bidopt::detail
