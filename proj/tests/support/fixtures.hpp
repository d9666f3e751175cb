#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <random>
#include <vector>

#include "bidopt/market.hpp"

namespace bidopt::testing {

using Knot = SupplyCurve::Knot;

inline SupplyCurve f1_curve() { return SupplyCurve::step({{1.0, 100.0}, {2.0, 300.0}}); }
inline SupplyCurve f2_g1() { return SupplyCurve::step({{1.0, 100.0}, {5.0, 200.0}}); }
inline SupplyCurve f2_g2() { return SupplyCurve::step({{0.5, 100.0}}); }
inline SupplyCurve f3_curve() { return SupplyCurve::linear({{0.0, 0.0}, {10.0, 1000.0}}); }

inline ProblemInstance f1() {
  return ProblemInstance({{"c1", 150.0, {}}}, {{"g1", f1_curve(), {}}}, {{"g1"}});
}

inline ProblemInstance f2() {
  return ProblemInstance({{"c1", 150.0, {}}, {"c2", 50.0, {}}},
                         {{"g1", f2_g1(), {}}, {"g2", f2_g2(), {}}}, {{"g1"}, {"g1", "g2"}});
}

inline ProblemInstance f3() {
  return ProblemInstance({{"c1", 150.0, {}}}, {{"g1", f3_curve(), {}}}, {{"g1"}});
}

/// Random step curve: 1..max_knots knots at distinct bids from {0.5, 1.0, ..., 5.0}
/// with integer volumes.
inline SupplyCurve random_step_curve(std::mt19937_64& rng, int max_knots = 4) {
  std::uniform_int_distribution<int> nk(1, max_knots);
  const int n = nk(rng);
  std::vector<int> slots(10);
  for (int k = 0; k < 10; ++k) slots[k] = k + 1;
  std::shuffle(slots.begin(), slots.end(), rng);
  slots.resize(n);
  std::sort(slots.begin(), slots.end());
  std::uniform_int_distribution<int> inc(1, 100);
  std::vector<Knot> knots;
  double v = 0.0;
  for (int s : slots) {
    v += inc(rng);
    knots.push_back({0.5 * s, v});
  }
  return SupplyCurve::step(std::move(knots));
}

/// Random continuous piecewise-linear curve starting at (0, 0), with some
/// flat stretches.
inline SupplyCurve random_continuous_curve(std::mt19937_64& rng, int max_knots = 4) {
  std::uniform_int_distribution<int> nk(1, max_knots);
  std::uniform_int_distribution<int> inc(0, 100);
  std::uniform_real_distribution<double> width(0.25, 2.0);
  const int n = nk(rng);
  std::vector<Knot> knots{{0.0, 0.0}};
  double b = 0.0;
  double v = 0.0;
  for (int k = 0; k < n; ++k) {
    b += width(rng);
    v += k == 0 ? 1 + inc(rng) : inc(rng);
    knots.push_back({b, v});
  }
  return SupplyCurve::linear(std::move(knots));
}

struct RandomShape {
  int max_campaigns = 3;
  int max_groups = 3;
  int max_knots = 4;
  // Demands are built from group fractions on this grid, taken at the
  // groups' maximum volume, so every instance is feasible.
  int fraction_steps = 4;
  bool continuous = false;
};

inline ProblemInstance random_instance(std::mt19937_64& rng, const RandomShape& shape = {}) {
  std::uniform_int_distribution<int> ncd(1, shape.max_campaigns);
  std::uniform_int_distribution<int> ngd(1, shape.max_groups);
  const int nc = ncd(rng);
  const int ng = ngd(rng);
  std::vector<TargetingGroup> groups;
  for (int j = 0; j < ng; ++j) {
    auto curve = shape.continuous ? random_continuous_curve(rng, shape.max_knots)
                                  : random_step_curve(rng, shape.max_knots);
    groups.push_back({"g" + std::to_string(j + 1), std::move(curve), {}});
  }
  std::bernoulli_distribution coin(0.5);
  std::uniform_int_distribution<int> pick_c(0, nc - 1);
  std::vector<std::vector<int>> adm(nc);
  for (int i = 0; i < nc; ++i)
    for (int j = 0; j < ng; ++j)
      if (coin(rng)) adm[i].push_back(j);
  // Every group gets a campaign and every campaign a group.
  for (int j = 0; j < ng; ++j) {
    bool used = false;
    for (const auto& a : adm) used = used || std::find(a.begin(), a.end(), j) != a.end();
    if (!used) adm[pick_c(rng)].push_back(j);
  }
  std::uniform_int_distribution<int> pick_g(0, ng - 1);
  for (auto& a : adm)
    if (a.empty()) a.push_back(pick_g(rng));
  for (auto& a : adm) std::sort(a.begin(), a.end());

  // Every campaign first takes one fraction step of one of its groups, then
  // the remaining steps of each group are dealt out at random. With at least
  // as many steps as campaigns the first pass always finds an open group.
  const int q = std::max(shape.fraction_steps, nc);
  std::vector<int> left(ng, q);
  std::vector<std::vector<int>> steps(nc, std::vector<int>(ng, 0));
  for (int i = 0; i < nc; ++i) {
    std::vector<int> open;
    for (int j : adm[i])
      if (left[j] > 0) open.push_back(j);
    std::uniform_int_distribution<std::size_t> pick(0, open.size() - 1);
    const int j = open[pick(rng)];
    ++steps[i][j];
    --left[j];
  }
  for (int j = 0; j < ng; ++j) {
    std::vector<int> users;
    for (int i = 0; i < nc; ++i)
      if (std::binary_search(adm[i].begin(), adm[i].end(), j)) users.push_back(i);
    std::shuffle(users.begin(), users.end(), rng);
    for (int i : users) {
      std::uniform_int_distribution<int> take(0, left[j]);
      const int k = take(rng);
      left[j] -= k;
      steps[i][j] += k;
    }
  }
  std::vector<double> demand(nc, 0.0);
  for (int i = 0; i < nc; ++i)
    for (int j = 0; j < ng; ++j)
      demand[i] += static_cast<double>(steps[i][j]) / q * groups[j].curve.max_volume();

  std::vector<Campaign> campaigns;
  std::vector<std::vector<std::string>> adm_ids;
  for (int i = 0; i < nc; ++i) {
    campaigns.push_back({"c" + std::to_string(i + 1), demand[i], {}});
    std::vector<std::string> ids;
    for (int j : adm[i]) ids.push_back(groups[j].id);
    adm_ids.push_back(std::move(ids));
  }
  return ProblemInstance(std::move(campaigns), std::move(groups), adm_ids);
}

}  // namespace bidopt::testing
