#include "bidopt/single_group.hpp"

#include <algorithm>
#include <cmath>

#include "bidopt/errors.hpp"

namespace bidopt {

SingleGroupSolution solve_single(const SupplyCurve& curve, double demand) {
  if (!(demand >= 0.0) || !std::isfinite(demand)) throw DomainError("demand must be non-negative");
  SingleGroupSolution s;
  if (demand == 0.0) return s;
  s.b_star = curve.quantile(demand);
  const double v = curve.eval(s.b_star);
  const double area = curve.integral(s.b_star);
  s.gamma_star = demand / v;
  s.pure_cost = demand * s.b_star - s.gamma_star * area;
  s.lower_bound = demand * s.b_star - area;
  s.unused_share_bound = (1.0 - s.gamma_star) * area;
  s.jump_bound = (v - curve.left_limit(s.b_star)) / v * area;
  s.gap_bound = std::min(s.unused_share_bound, s.jump_bound);
  return s;
}

TwoPointMix two_point_mixed(const SupplyCurve& curve, double demand, double b1) {
  if (!(demand > 0.0)) throw DomainError("two-point mix needs positive demand");
  const double b_star = curve.quantile(demand);
  if (!(b1 >= 0.0)) throw DomainError("b1 must be non-negative");
  if (b1 >= b_star - kBidTolerance) throw DomainError("b1 must lie strictly below b*");
  if (!(curve.left_limit(b_star) > 0.0)) throw DomainError("no supply below b*; mixing cannot help");
  const double v = curve.eval(b_star);
  const double v1 = curve.eval(b1);
  const double g1 = (v - demand) / (v - v1);
  const double g2 = 1.0 - g1;
  TwoPointMix out;
  out.bids = {{b1, g1}, {b_star, g2}};
  out.impressions = g1 * v1 + g2 * v;
  out.cost = g1 * curve.win_cost(b1) + g2 * curve.win_cost(b_star);
  return out;
}

}  // namespace bidopt
