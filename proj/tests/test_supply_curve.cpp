#include <random>

#include "bidopt/errors.hpp"
#include "bidopt/supply_curve.hpp"
#include "doctest.h"
#include "support/checks.hpp"
#include "support/fixtures.hpp"

using namespace bidopt;
using namespace bidopt::testing;

TEST_CASE("eval is right-continuous and zero below the first knot") {
  const auto a = f1_curve();
  CHECK(a.eval(0.5) == 0.0);
  CHECK(a.eval(1.0) == 100.0);
  CHECK(a.eval(1.999) == 100.0);
  CHECK(a.eval(2.0) == 300.0);
  CHECK(a.eval(50.0) == 300.0);
  CHECK(f3_curve().eval(1.5) == doctest::Approx(150.0).epsilon(1e-12));
  CHECK(f3_curve().eval(25.0) == 1000.0);
  CHECK_THROWS_AS(a.eval(-1.0), DomainError);
}

TEST_CASE("left limits") {
  const auto a = f1_curve();
  CHECK(a.left_limit(2.0) == 100.0);
  CHECK(a.left_limit(1.5) == 100.0);
  CHECK(a.left_limit(1.0) == 0.0);
  CHECK(a.left_limit(0.0) == 0.0);
  CHECK(f3_curve().left_limit(1.5) == doctest::Approx(150.0));
  CHECK_THROWS_AS(a.left_limit(-0.1), DomainError);
}

TEST_CASE("integrals") {
  const auto a = f1_curve();
  CHECK(a.integral(1.0) == 0.0);
  CHECK(a.integral(2.0) == doctest::Approx(100.0));
  CHECK(a.integral(3.0) == doctest::Approx(400.0));
  CHECK(f3_curve().integral(1.5) == doctest::Approx(112.5));
  CHECK(f3_curve().integral(12.0) == doctest::Approx(5000.0 + 2000.0));
  CHECK_THROWS_AS(a.integral(-2.0), DomainError);
}

TEST_CASE("win cost is the second-price payment") {
  const auto a = f1_curve();
  CHECK(a.win_cost(2.0) == doctest::Approx(500.0));
  CHECK(a.win_cost(1.7) == doctest::Approx(100.0));
  CHECK(a.win_cost(1.0) == doctest::Approx(100.0));
  CHECK(a.win_cost(0.0) == 0.0);
  CHECK(f3_curve().win_cost(0.0) == 0.0);
  // 150 * 1.5 - 112.5
  CHECK(f3_curve().win_cost(1.5) == doctest::Approx(112.5));
}

TEST_CASE("quantile") {
  const auto a = f1_curve();
  CHECK(a.quantile(150.0) == 2.0);
  CHECK(a.quantile(100.0) == 1.0);
  CHECK(a.quantile(300.0) == 2.0);
  CHECK(a.quantile(0.0) == 0.0);
  CHECK(f3_curve().quantile(150.0) == doctest::Approx(1.5).epsilon(1e-14));
  CHECK_THROWS_AS(a.quantile(301.0), UnsatisfiableSupply);
  try {
    a.quantile(301.0);
  } catch (const UnsatisfiableSupply& e) {
    CHECK(e.target() == 301.0);
    CHECK(e.max_volume() == 300.0);
  }
}

TEST_CASE("aggregate") {
  const std::vector<SupplyCurve> two{f2_g1(), f2_g2()};
  const auto s = aggregate(two);
  CHECK(s.eval(1.0) == 200.0);
  CHECK(s.eval(0.7) == 100.0);
  CHECK(s.eval(5.0) == 300.0);
  CHECK(s.left_limit(1.0) == 100.0);

  const std::vector<SupplyCurve> one{f1_curve()};
  const auto id = aggregate(one);
  for (double b : {0.0, 0.5, 1.0, 1.5, 2.0, 3.0}) CHECK(id.eval(b) == f1_curve().eval(b));

  const std::vector<SupplyCurve> twice{f2_g2(), f2_g2()};
  CHECK(aggregate(twice).eval(0.5) == 200.0);

  CHECK_THROWS_AS(aggregate(std::span<const SupplyCurve>{}), DomainError);
}

TEST_CASE("aggregate of a step and a linear curve keeps both shapes") {
  const std::vector<SupplyCurve> cs{f1_curve(), f3_curve()};
  const auto s = aggregate(cs);
  CHECK(s.eval(1.5) == doctest::Approx(250.0));
  CHECK(s.left_limit(2.0) == doctest::Approx(300.0));
  CHECK(s.eval(2.0) == doctest::Approx(500.0));
  CHECK_FALSE(s.is_step());
  CHECK_FALSE(s.is_continuous());
  const double expect = f1_curve().integral(4.0) + f3_curve().integral(4.0);
  CHECK(s.integral(4.0) == doctest::Approx(expect));
}

TEST_CASE("mixed segment kinds") {
  const auto c = SupplyCurve::mixed({{0.0, 0.0}, {1.0, 100.0}, {2.0, 150.0}},
                                    {SupplyCurve::Segment::kLinear, SupplyCurve::Segment::kStep});
  CHECK(c.eval(0.5) == doctest::Approx(50.0));
  CHECK(c.eval(1.5) == 100.0);
  CHECK(c.left_limit(2.0) == 100.0);
  CHECK(c.eval(2.0) == 150.0);
  CHECK(c.is_continuous_at(1.0));
  CHECK_FALSE(c.is_continuous_at(2.0));
  CHECK(c.integral(2.0) == doctest::Approx(50.0 + 100.0));
  CHECK(c.flat_region_start(2.0) == doctest::Approx(1.0));
  CHECK(c.flat_region_start(1.0) < 0.0);
}

TEST_CASE("flat region start") {
  const auto a = f1_curve();
  CHECK(a.flat_region_start(2.0) == 1.0);
  CHECK(a.flat_region_start(1.0) == 0.0);
  CHECK(f2_g1().flat_region_start(5.0) == 1.0);
  CHECK(f3_curve().flat_region_start(1.5) < 0.0);
}

TEST_CASE("construction rejects malformed knots") {
  CHECK_THROWS_AS(SupplyCurve::step({}), DomainError);
  CHECK_THROWS_AS(SupplyCurve::step({{1.0, 10.0}, {1.0, 20.0}}), DomainError);
  CHECK_THROWS_AS(SupplyCurve::step({{2.0, 10.0}, {1.0, 20.0}}), DomainError);
  CHECK_THROWS_AS(SupplyCurve::step({{1.0, 20.0}, {2.0, 10.0}}), DomainError);
  CHECK_THROWS_AS(SupplyCurve::step({{-1.0, 20.0}}), DomainError);
  CHECK_THROWS_AS(SupplyCurve::step({{1.0, -5.0}}), DomainError);
  CHECK_THROWS_AS(SupplyCurve::mixed({{0.0, 0.0}, {1.0, 1.0}}, {}), DomainError);
  CHECK_THROWS_AS(SupplyCurve::piecewise({{0.0, 0.0}, {1.0, 5.0}}, {6.0}), DomainError);
}

TEST_CASE("zero curve") {
  const SupplyCurve z;
  CHECK(z.eval(3.0) == 0.0);
  CHECK(z.integral(3.0) == 0.0);
  CHECK(z.max_volume() == 0.0);
  CHECK(z.quantile(0.0) == 0.0);
  CHECK_THROWS_AS(z.quantile(1.0), UnsatisfiableSupply);
}

namespace {

void check_curve_properties(const SupplyCurve& c, std::mt19937_64& rng) {
  const double top = c.bids().back() + 1.0;
  std::uniform_real_distribution<double> u(0.0, top);
  std::vector<double> breaks(c.bids().begin(), c.bids().end());
  for (int k = 0; k < 30; ++k) {
    double a = u(rng), b = u(rng);
    if (a > b) std::swap(a, b);
    CHECK(c.eval(a) <= c.eval(b));
    CHECK(c.integral(a) <= c.integral(b) + 1e-12);
    CHECK(c.win_cost(a) <= c.win_cost(b) + 1e-9 * std::max(1.0, c.win_cost(b)));
    CHECK(c.left_limit(b) <= c.eval(b));

    // Closed forms against independent quadrature and Stieltjes sums.
    const double q = quadrature([&](double x) { return c.eval(x); }, breaks, b);
    CHECK(rel_close(c.integral(b), q, 1e-9));
    CHECK(rel_close(c.win_cost(b), c.eval(b) * b - q, 1e-9));
    CHECK(rel_close(c.win_cost(b), stieltjes_win_cost(c, b), 1e-9));

    // Convexity of the integral.
    const double m = 0.5 * (a + b);
    CHECK(c.integral(m) <= 0.5 * (c.integral(a) + c.integral(b)) + 1e-9 * std::max(1.0, c.integral(b)));

    // Section property.
    std::uniform_real_distribution<double> t(0.0, c.max_volume());
    const double target = t(rng);
    const double p = c.quantile(target);
    CHECK(c.eval(p) >= target);
    if (p > 0.0) CHECK(c.eval(std::max(0.0, p - 1e-9)) < target);
    CHECK(p == doctest::Approx(bisect_quantile([&](double x) { return c.eval(x); }, target, top)).epsilon(1e-9));
  }
  // Left limits agree with approaching from below away from knots.
  for (double b : c.bids()) {
    if (b <= 0.0) continue;
    CHECK(c.left_limit(b) == doctest::Approx(c.eval(b - 1e-7)).epsilon(1e-5));
  }
  // Flat stretches of a step curve cost nothing extra.
  if (c.is_step()) {
    const auto bids = c.bids();
    for (std::size_t k = 0; k < bids.size(); ++k) {
      const double hi = k + 1 < bids.size() ? bids[k + 1] : bids[k] + 3.0;
      const double x = bids[k] + 0.37 * (hi - bids[k]);
      CHECK(c.win_cost(x) == c.win_cost(bids[k]));
    }
  }
}

}  // namespace

TEST_CASE("random step curves satisfy the curve laws") {
  std::mt19937_64 rng(11);
  for (int n = 0; n < 200; ++n) check_curve_properties(random_step_curve(rng, 5), rng);
}

TEST_CASE("random continuous curves satisfy the curve laws") {
  std::mt19937_64 rng(12);
  for (int n = 0; n < 200; ++n) {
    const auto c = random_continuous_curve(rng, 5);
    CHECK(c.is_continuous());
    check_curve_properties(c, rng);
  }
}

TEST_CASE("random aggregates are pointwise sums") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 8.0);
  for (int n = 0; n < 100; ++n) {
    std::vector<SupplyCurve> cs{random_step_curve(rng), random_continuous_curve(rng), random_step_curve(rng)};
    const auto s = aggregate(cs);
    for (int k = 0; k < 20; ++k) {
      const double b = u(rng);
      double e = 0, l = 0, i = 0;
      for (const auto& c : cs) {
        e += c.eval(b);
        l += c.left_limit(b);
        i += c.integral(b);
      }
      CHECK(rel_close(s.eval(b), e, 1e-12));
      CHECK(rel_close(s.left_limit(b), l, 1e-12));
      CHECK(rel_close(s.integral(b), i, 1e-10));
    }
    check_curve_properties(s, rng);
  }
}
