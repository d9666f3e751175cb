#include <cmath>
#include <map>

#include "bidopt/auction_sim.hpp"
#include "bidopt/errors.hpp"
#include "bidopt/solver.hpp"
#include "doctest.h"
#include "support/fixtures.hpp"

using namespace bidopt;
using namespace bidopt::testing;

TEST_CASE("request streams follow the curve's atoms") {
  const auto inst = f1();
  std::map<double, int> count;
  int total = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto s = sample_stream(inst, 0, seed);
    CHECK(s.size() == 300);
    for (const auto& r : s) {
      ++count[r.competing_price];
      ++total;
    }
  }
  REQUIRE(count.size() == 2);
  const double p1 = count[1.0] / static_cast<double>(total);
  // 12000 draws; 1/3 with standard error about 0.0043.
  CHECK(std::abs(p1 - 1.0 / 3.0) < 4 * std::sqrt(2.0 / 9.0 / total));

  const ProblemInstance single({{"c1", 5.0, {}}}, {{"g1", SupplyCurve::step({{0.7, 25.0}}), {}}}, {{"g1"}});
  for (const auto& r : sample_stream(single, 0, 3)) CHECK(r.competing_price == 0.7);

  const ProblemInstance empty({{"c1", 5.0, {}}}, {{"g1", SupplyCurve::step({{1.0, 0.0}}), {}}}, {{"g1"}});
  CHECK(sample_stream(empty, 0, 3).empty());
}

TEST_CASE("streams are reproducible and distinct across seeds") {
  const auto inst = f1();
  const auto a = sample_stream(inst, 0, 5, 2);
  const auto b = sample_stream(inst, 0, 5, 2);
  const auto c = sample_stream(inst, 0, 6, 2);
  REQUIRE(a.size() == b.size());
  bool same = true, differs = false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    same = same && a[k].competing_price == b[k].competing_price;
    differs = differs || a[k].competing_price != c[k].competing_price;
  }
  CHECK(same);
  CHECK(differs);
}

TEST_CASE("serving decisions") {
  const PureAllocation pure{{{0, 0}, {2.0, 0.5}}};
  auto d = serve(pure, 0, 0.3);
  CHECK(d.bid);
  CHECK(d.campaign == 0);
  CHECK(d.value == 2.0);
  CHECK_FALSE(serve(pure, 0, 0.7).bid);
  CHECK_FALSE(serve(pure, 3, 0.1).bid);

  const MixedStrategy mixed{{{0, 0}, {{1.0, 0.75}, {2.0, 0.25}}}};
  CHECK(serve(mixed, 0, 0.8).value == 2.0);
  CHECK(serve(mixed, 0, 0.1).value == 1.0);
}

TEST_CASE("replications match the analytic costs") {
  const auto inst = f1();
  const PureAllocation pure{{{0, 0}, {2.0, 0.5}}};
  const MixedStrategy mixed{{{0, 0}, {{1.0, 0.75}, {2.0, 0.25}}}};
  int pure_ok = 0, mixed_ok = 0;
  for (std::uint64_t seed = 100; seed < 120; ++seed) {
    const auto rp = run_simulation(inst, pure, {seed, 10, false});
    const auto rm = run_simulation(inst, mixed, {seed, 10, false});
    CHECK(rp.campaigns[0].expected_impressions == doctest::Approx(150.0));
    CHECK(rp.campaigns[0].expected_cost == doctest::Approx(250.0));
    CHECK(rm.campaigns[0].expected_cost == doctest::Approx(200.0));
    pure_ok += std::abs(rp.campaigns[0].z_cost) < 3 && std::abs(rp.campaigns[0].z_impressions) < 3;
    mixed_ok += std::abs(rm.campaigns[0].z_cost) < 3 && std::abs(rm.campaigns[0].z_impressions) < 3;
    CHECK(rp.groups[0].requests == 3000);
    CHECK(rp.groups[0].wins <= rp.groups[0].bids);
    CHECK(rp.groups[0].bids <= rp.groups[0].requests);
  }
  CHECK(pure_ok >= 18);
  CHECK(mixed_ok >= 18);
}

TEST_CASE("independent recount of one replication") {
  const auto inst = f1();
  const PureAllocation pure{{{0, 0}, {1.0, 1.0}}};
  const auto r = run_simulation(inst, pure, {9, 1, false});
  // With fraction 1 every request gets a bid, so wins are the stream's 1.0 prices.
  double wins = 0, cost = 0;
  for (const auto& q : sample_stream(inst, 0, 9, 0))
    if (q.competing_price <= 1.0) {
      ++wins;
      cost += q.competing_price;
    }
  CHECK(r.campaigns[0].mean_impressions == wins);
  CHECK(r.campaigns[0].mean_cost == doctest::Approx(cost));
}

TEST_CASE("bidding exactly at a knot wins the knot's atom") {
  const ProblemInstance inst({{"c1", 5.0, {}}}, {{"g1", SupplyCurve::step({{2.0, 40.0}}), {}}}, {{"g1"}});
  const auto r = run_simulation(inst, PureAllocation{{{0, 0}, {2.0, 1.0}}}, {1, 3, false});
  CHECK(r.campaigns[0].mean_impressions == 40.0);
  CHECK(r.campaigns[0].mean_cost == doctest::Approx(80.0));
  CHECK(r.campaigns[0].se_impressions == 0.0);
  CHECK(r.campaigns[0].z_impressions == 0.0);
}

TEST_CASE("zero strategy, determinism and Poisson counts") {
  const auto inst = f2();
  const auto zero = run_simulation(inst, PureAllocation{{{0, 0}, {5.0, 0.0}}}, {3, 5, false});
  for (const auto& c : zero.campaigns) {
    CHECK(c.mean_impressions == 0.0);
    CHECK(c.mean_cost == 0.0);
  }

  const auto d = decompose(inst);
  const auto s = build_mixed(inst, d).strategy;
  const auto a = run_simulation(inst, s, {77, 4, false});
  const auto b = run_simulation(inst, s, {77, 4, false});
  for (std::size_t i = 0; i < inst.num_campaigns(); ++i) {
    CHECK(a.campaigns[i].mean_cost == b.campaigns[i].mean_cost);
    CHECK(a.campaigns[i].mean_impressions == b.campaigns[i].mean_impressions);
  }
  CHECK(a.mean_total_cost == b.mean_total_cost);

  const auto p = run_simulation(inst, s, {78, 50, true});
  // g1 has V = 200; 50 Poisson replications give standard error 2 on the mean.
  CHECK(std::abs(static_cast<double>(p.groups[0].requests) / 50.0 - 200.0) < 10.0);
  CHECK(p.poisson);
}

TEST_CASE("unsupported curves and options") {
  CHECK_THROWS_AS(sample_stream(f3(), 0, 1), UnsupportedCurve);
  const ProblemInstance frac({{"c1", 5.0, {}}}, {{"g1", SupplyCurve::step({{1.0, 10.5}}), {}}}, {{"g1"}});
  CHECK_THROWS_AS(run_simulation(frac, PureAllocation{}, {1, 1, false}), UnsupportedCurve);
  CHECK_THROWS_AS(run_simulation(f1(), PureAllocation{}, {1, 0, false}), DomainError);
}
