#pragma once

#include <span>
#include <vector>

namespace bidopt {

/// Absolute tolerance used for every comparison between bid values.
inline constexpr double kBidTolerance = 1e-12;

/// A right-continuous, non-decreasing map from bid value to the number of
/// impressions won when bidding that value on every request of a group.
///
/// The curve is described by knots b_0 < b_1 < ... < b_{n-1} with the value
/// D(b_k) at each knot and, for every interval [b_k, b_{k+1}), a segment that
/// is linear from D(b_k) towards the left limit D(b_{k+1}^-). A step segment
/// has D(b_{k+1}^-) = D(b_k); a linear segment has D(b_{k+1}^-) = D(b_{k+1}).
/// Both kinds can be mixed, and a general segment may be linear and still end
/// in a jump (this arises when step and linear curves are added).
///
/// The curve is 0 below the first knot and constant after the last one.
/// Instances are immutable; every member function is pure.
class SupplyCurve {
 public:
  enum class Segment { kStep, kLinear };

  struct Knot {
    double bid;
    double volume;
  };

  /// The identically-zero curve.
  SupplyCurve() = default;

  static SupplyCurve step(std::vector<Knot> knots);
  static SupplyCurve linear(std::vector<Knot> knots);
  static SupplyCurve mixed(std::vector<Knot> knots, std::vector<Segment> segments);
  /// `left_limits[k]` is the limit of the curve when approaching
  /// knots[k + 1].bid from the left; its size is knots.size() - 1.
  static SupplyCurve piecewise(std::vector<Knot> knots, std::vector<double> left_limits);

  /// D(b). Throws DomainError for negative bids.
  double eval(double bid) const;
  /// D^-(b) = lim_{x -> b, x < b} D(x); defined as 0 at b = 0.
  double left_limit(double bid) const;
  /// Integral of D over [0, b].
  double integral(double bid) const;
  /// Expected second-price payment for bidding b on every request:
  /// D(b) b - integral(b), evaluated as the Stieltjes integral of x dD(x) so
  /// that it is exactly constant wherever D is flat.
  double win_cost(double bid) const;
  /// Smallest b with D(b) >= target. Throws UnsatisfiableSupply when target
  /// exceeds max_volume().
  double quantile(double target) const;

  double max_volume() const { return values_.empty() ? 0.0 : values_.back(); }
  bool empty() const { return bids_.empty(); }
  std::size_t size() const { return bids_.size(); }

  std::span<const double> bids() const { return bids_; }
  std::span<const double> values() const { return values_; }
  /// Left limit at each knot; entry 0 is always 0.
  std::span<const double> knot_left_limits() const { return limits_; }

  /// True when every segment is flat, i.e. the curve is a step function.
  bool is_step() const;
  /// True when the curve has no jump anywhere on [0, inf).
  bool is_continuous() const;
  /// True when D^-(b) == D(b) at this bid.
  bool is_continuous_at(double bid) const;
  /// Largest bid at which the curve has a jump that is strictly below `bid`
  /// together with all segments in between being flat; i.e. the left end of
  /// the maximal flat region ending at `bid`. Returns a negative value when
  /// the curve is not flat immediately below `bid`.
  double flat_region_start(double bid) const;

  /// Segment description for serialization: kStep / kLinear when the
  /// segment matches one of those kinds exactly.
  bool segment_is_flat(std::size_t k) const;
  bool segment_is_continuous(std::size_t k) const;

 private:
  SupplyCurve(std::vector<double> bids, std::vector<double> values, std::vector<double> limits);
  // Index of the last knot at or below `bid` (bids snapped to knots within
  // kBidTolerance), or -1 when `bid` lies below the first knot.
  std::ptrdiff_t locate(double bid) const;
  double slope(std::size_t k) const;

  std::vector<double> bids_;
  std::vector<double> values_;
  std::vector<double> limits_;
  std::vector<double> integral_at_;
  std::vector<double> win_cost_at_;
};

/// Pointwise sum of curves. The knot set of the result is the union of the
/// input knots.
SupplyCurve aggregate(std::span<const SupplyCurve> curves);

}  // namespace bidopt
