#include "bidopt/supply_curve.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bidopt/errors.hpp"

namespace bidopt {

namespace {

void check_bid(double bid) {
  if (!(bid >= 0.0) || !std::isfinite(bid)) {
    std::ostringstream os;
    os << "bid must be a finite non-negative number, got " << bid;
    throw DomainError(os.str());
  }
}

std::vector<double> split_bids(const std::vector<SupplyCurve::Knot>& knots) {
  std::vector<double> out;
  out.reserve(knots.size());
  for (const auto& k : knots) out.push_back(k.bid);
  return out;
}

std::vector<double> split_values(const std::vector<SupplyCurve::Knot>& knots) {
  std::vector<double> out;
  out.reserve(knots.size());
  for (const auto& k : knots) out.push_back(k.volume);
  return out;
}

}  // namespace

SupplyCurve::SupplyCurve(std::vector<double> bids, std::vector<double> values,
                         std::vector<double> limits)
    : bids_(std::move(bids)), values_(std::move(values)), limits_(std::move(limits)) {
  const std::size_t n = bids_.size();
  if (n == 0) throw DomainError("supply curve needs at least one knot");
  for (std::size_t k = 0; k < n; ++k) {
    check_bid(bids_[k]);
    if (!std::isfinite(values_[k]) || values_[k] < 0.0)
      throw DomainError("supply volumes must be finite and non-negative");
    if (k > 0) {
      if (!(bids_[k] - bids_[k - 1] > kBidTolerance))
        throw DomainError("knot bids must be strictly increasing");
      if (!std::isfinite(limits_[k]) || limits_[k] < values_[k - 1] || limits_[k] > values_[k])
        throw DomainError("supply curve must be non-decreasing");
    }
  }
  limits_[0] = 0.0;

  integral_at_.assign(n, 0.0);
  win_cost_at_.assign(n, 0.0);
  win_cost_at_[0] = values_[0] * bids_[0];
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double w = bids_[k + 1] - bids_[k];
    integral_at_[k + 1] = integral_at_[k] + 0.5 * (values_[k] + limits_[k + 1]) * w;
    const double rise = limits_[k + 1] - values_[k];
    // Continuous part: slope * (b_{k+1}^2 - b_k^2) / 2 = rise * midpoint.
    const double cont = rise * 0.5 * (bids_[k + 1] + bids_[k]);
    const double jump = (values_[k + 1] - limits_[k + 1]) * bids_[k + 1];
    win_cost_at_[k + 1] = win_cost_at_[k] + cont + jump;
  }
}

SupplyCurve SupplyCurve::step(std::vector<Knot> knots) {
  auto values = split_values(knots);
  std::vector<double> limits(knots.size(), 0.0);
  for (std::size_t k = 1; k < knots.size(); ++k) limits[k] = values[k - 1];
  return SupplyCurve(split_bids(knots), std::move(values), std::move(limits));
}

SupplyCurve SupplyCurve::linear(std::vector<Knot> knots) {
  auto values = split_values(knots);
  std::vector<double> limits = values;
  if (!limits.empty()) limits[0] = 0.0;
  return SupplyCurve(split_bids(knots), std::move(values), std::move(limits));
}

SupplyCurve SupplyCurve::mixed(std::vector<Knot> knots, std::vector<Segment> segments) {
  if (!knots.empty() && segments.size() != knots.size() - 1)
    throw DomainError("mixed curve needs one segment kind per knot interval");
  auto values = split_values(knots);
  std::vector<double> limits(knots.size(), 0.0);
  for (std::size_t k = 1; k < knots.size(); ++k)
    limits[k] = segments[k - 1] == Segment::kStep ? values[k - 1] : values[k];
  return SupplyCurve(split_bids(knots), std::move(values), std::move(limits));
}

SupplyCurve SupplyCurve::piecewise(std::vector<Knot> knots, std::vector<double> left_limits) {
  if (!knots.empty() && left_limits.size() != knots.size() - 1)
    throw DomainError("piecewise curve needs one left limit per knot interval");
  std::vector<double> limits(knots.size(), 0.0);
  for (std::size_t k = 1; k < knots.size(); ++k) limits[k] = left_limits[k - 1];
  return SupplyCurve(split_bids(knots), split_values(knots), std::move(limits));
}

std::ptrdiff_t SupplyCurve::locate(double bid) const {
  auto it = std::upper_bound(bids_.begin(), bids_.end(), bid + kBidTolerance);
  return std::distance(bids_.begin(), it) - 1;
}

double SupplyCurve::slope(std::size_t k) const {
  return (limits_[k + 1] - values_[k]) / (bids_[k + 1] - bids_[k]);
}

double SupplyCurve::eval(double bid) const {
  check_bid(bid);
  const auto k = locate(bid);
  if (k < 0) return 0.0;
  const auto u = static_cast<std::size_t>(k);
  const double dx = bid - bids_[u];
  if (u + 1 == bids_.size() || dx <= kBidTolerance) return values_[u];
  return std::min(values_[u] + slope(u) * dx, limits_[u + 1]);
}

double SupplyCurve::left_limit(double bid) const {
  check_bid(bid);
  if (bid == 0.0) return 0.0;
  const auto k = locate(bid);
  if (k < 0) return 0.0;
  const auto u = static_cast<std::size_t>(k);
  if (std::abs(bid - bids_[u]) <= kBidTolerance) return limits_[u];
  return eval(bid);
}

double SupplyCurve::integral(double bid) const {
  check_bid(bid);
  const auto k = locate(bid);
  if (k < 0) return 0.0;
  const auto u = static_cast<std::size_t>(k);
  const double dx = bid - bids_[u];
  if (dx <= kBidTolerance) return integral_at_[u];
  if (u + 1 == bids_.size()) return integral_at_[u] + values_[u] * dx;
  return integral_at_[u] + (values_[u] + 0.5 * slope(u) * dx) * dx;
}

double SupplyCurve::win_cost(double bid) const {
  check_bid(bid);
  const auto k = locate(bid);
  if (k < 0) return 0.0;
  const auto u = static_cast<std::size_t>(k);
  const double dx = bid - bids_[u];
  if (u + 1 == bids_.size() || dx <= kBidTolerance) return win_cost_at_[u];
  const double s = slope(u);
  if (s == 0.0) return win_cost_at_[u];
  return win_cost_at_[u] + s * dx * (bids_[u] + 0.5 * dx);
}

double SupplyCurve::quantile(double target) const {
  if (!(target >= 0.0) || !std::isfinite(target))
    throw DomainError("quantile target must be finite and non-negative");
  if (target > max_volume()) throw UnsatisfiableSupply(target, max_volume());
  if (target == 0.0) return 0.0;
  const std::size_t n = bids_.size();
  for (std::size_t k = 0; k < n; ++k) {
    if (values_[k] >= target) return bids_[k];
    if (k + 1 < n && limits_[k + 1] > target) {
      double b = bids_[k] + (target - values_[k]) / slope(k);
      b = std::clamp(b, bids_[k], bids_[k + 1]);
      while (b < bids_[k + 1] && eval(b) < target) b = std::nextafter(b, bids_[k + 1]);
      // Step back while the previous representable bid still attains the target.
      while (b > bids_[k]) {
        const double prev = std::nextafter(b, bids_[k]);
        if (eval(prev) < target) break;
        b = prev;
      }
      return b;
    }
  }
  return bids_.back();
}

bool SupplyCurve::segment_is_flat(std::size_t k) const { return limits_[k + 1] == values_[k]; }

bool SupplyCurve::segment_is_continuous(std::size_t k) const {
  return limits_[k + 1] == values_[k + 1];
}

bool SupplyCurve::is_step() const {
  for (std::size_t k = 0; k + 1 < bids_.size(); ++k)
    if (!segment_is_flat(k)) return false;
  return true;
}

bool SupplyCurve::is_continuous() const {
  if (!values_.empty() && values_[0] != 0.0) return false;
  for (std::size_t k = 0; k + 1 < bids_.size(); ++k)
    if (!segment_is_continuous(k)) return false;
  return true;
}

bool SupplyCurve::is_continuous_at(double bid) const { return left_limit(bid) == eval(bid); }

double SupplyCurve::flat_region_start(double bid) const {
  check_bid(bid);
  // Last knot strictly below the bid.
  auto it = std::lower_bound(bids_.begin(), bids_.end(), bid - kBidTolerance);
  std::ptrdiff_t k = std::distance(bids_.begin(), it) - 1;
  if (k < 0) return 0.0;
  auto u = static_cast<std::size_t>(k);
  if (u + 1 < bids_.size() && !segment_is_flat(u)) return -1.0;
  while (u > 0 && segment_is_flat(u - 1) && limits_[u] == values_[u]) --u;
  if (u == 0 && values_[0] == 0.0) return 0.0;
  return bids_[u];
}

SupplyCurve aggregate(std::span<const SupplyCurve> curves) {
  if (curves.empty()) throw DomainError("aggregate needs at least one curve");
  std::vector<double> bids;
  for (const auto& c : curves) bids.insert(bids.end(), c.bids().begin(), c.bids().end());
  std::sort(bids.begin(), bids.end());
  std::vector<double> knots;
  for (double b : bids)
    if (knots.empty() || b - knots.back() > kBidTolerance) knots.push_back(b);
  if (knots.empty()) return SupplyCurve{};

  std::vector<SupplyCurve::Knot> out;
  std::vector<double> limits;
  out.reserve(knots.size());
  for (std::size_t k = 0; k < knots.size(); ++k) {
    double v = 0.0;
    double w = 0.0;
    for (const auto& c : curves) {
      if (c.empty()) continue;
      v += c.eval(knots[k]);
      if (k > 0) w += c.left_limit(knots[k]);
    }
    out.push_back({knots[k], v});
    if (k > 0) limits.push_back(std::clamp(w, out[k - 1].volume, v));
  }
  return SupplyCurve::piecewise(std::move(out), std::move(limits));
}

}  // namespace bidopt
