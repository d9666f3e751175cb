#include "bidopt/auction_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bidopt/errors.hpp"

namespace bidopt {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

StreamRng::StreamRng(std::uint64_t seed, std::uint64_t replication, std::uint64_t group)
    : engine_(splitmix64(splitmix64(splitmix64(seed) ^ replication) ^ (group + 0x632be59bd9b4e019ULL))) {}

double StreamRng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

namespace {

// Neumaier compensated sum.
class Accumulator {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

std::uint64_t request_volume(const ProblemInstance& inst, std::size_t j) {
  const auto& curve = inst.group(j).curve;
  if (!curve.is_step())
    throw UnsupportedCurve("group '" + inst.group(j).id + "' has linear segments; the simulator replays step curves only");
  const double v = curve.max_volume();
  if (std::abs(v - std::round(v)) > 1e-9 * std::max(1.0, v))
    throw UnsupportedCurve("group '" + inst.group(j).id + "' has a non-integral request volume");
  return static_cast<std::uint64_t>(std::llround(v));
}

double competing_price(const SupplyCurve& curve, double u) {
  const double x = u * curve.max_volume();
  const auto bids = curve.bids();
  const auto vals = curve.values();
  for (std::size_t k = 0; k < bids.size(); ++k)
    if (x < vals[k]) return bids[k];
  return bids.back();
}

// Sum over atoms at or below b of jump * price^2.
double second_moment(const SupplyCurve& curve, double b) {
  const auto bids = curve.bids();
  const auto vals = curve.values();
  const auto lims = curve.knot_left_limits();
  double m = 0.0;
  for (std::size_t k = 0; k < bids.size() && bids[k] <= b + kBidTolerance; ++k)
    m += (vals[k] - lims[k]) * bids[k] * bids[k];
  return m;
}

template <class Entry>
ServeDecision pick(const std::vector<std::pair<std::size_t, Entry>>& slots, double u) {
  double cum = 0.0;
  for (const auto& [campaign, e] : slots) {
    cum += e.fraction;
    if (u < cum) return {true, campaign, e.bid};
  }
  return {};
}

std::vector<std::pair<std::size_t, BidFraction>> slots_of(const MixedStrategy& s, std::size_t group) {
  std::vector<std::pair<std::size_t, BidFraction>> out;
  for (const auto& [key, bids] : s) {
    if (key.group != group) continue;
    auto sorted = bids;
    std::sort(sorted.begin(), sorted.end(), [](const BidFraction& a, const BidFraction& b) { return a.bid < b.bid; });
    for (const auto& b : sorted)
      if (b.fraction > 0.0) out.emplace_back(key.campaign, b);
  }
  return out;
}

}  // namespace

std::vector<BidRequest> sample_stream(const ProblemInstance& instance, std::size_t group,
                                      std::uint64_t seed, std::uint64_t replication, bool poisson) {
  const std::uint64_t v = request_volume(instance, group);
  const auto& curve = instance.group(group).curve;
  StreamRng rng(seed, replication, group);
  std::uint64_t n = v;
  if (poisson && v > 0) n = std::poisson_distribution<std::uint64_t>(static_cast<double>(v))(rng.engine());
  std::vector<BidRequest> out;
  out.reserve(n);
  for (std::uint64_t r = 0; r < n; ++r) {
    out.push_back({group, competing_price(curve, rng.uniform())});
    // The second draw of each request drives the bidder's decision.
    rng.uniform();
  }
  return out;
}

ServeDecision serve(const PureAllocation& strategy, std::size_t group, double u) {
  std::vector<std::pair<std::size_t, PureEntry>> slots;
  for (const auto& [key, e] : strategy)
    if (key.group == group && e.fraction > 0.0) slots.emplace_back(key.campaign, e);
  return pick(slots, u);
}

ServeDecision serve(const MixedStrategy& strategy, std::size_t group, double u) {
  return pick(slots_of(strategy, group), u);
}

SimReport run_simulation(const ProblemInstance& instance, const MixedStrategy& strategy,
                         const SimOptions& options) {
  if (options.replications == 0) throw DomainError("replications must be positive");
  const std::size_t nc = instance.num_campaigns();
  const std::size_t ng = instance.num_groups();
  std::vector<std::uint64_t> volume(ng);
  for (std::size_t j = 0; j < ng; ++j) volume[j] = request_volume(instance, j);
  mixed_cost(instance, strategy);  // validates admissibility

  SimReport rep;
  rep.replications = options.replications;
  rep.seed = options.seed;
  rep.poisson = options.poisson;
  rep.groups.assign(ng, {});
  rep.campaigns.assign(nc, {});

  std::vector<Accumulator> imp_sum(nc), cost_sum(nc);
  for (std::size_t r = 0; r < options.replications; ++r) {
    std::vector<std::uint64_t> won(nc, 0);
    std::vector<Accumulator> paid(nc);
    for (std::size_t j = 0; j < ng; ++j) {
      const auto& curve = instance.group(j).curve;
      const auto slots = slots_of(strategy, j);
      StreamRng rng(options.seed, r, j);
      std::uint64_t n = volume[j];
      if (options.poisson && n > 0)
        n = std::poisson_distribution<std::uint64_t>(static_cast<double>(n))(rng.engine());
      auto& gs = rep.groups[j];
      gs.requests += n;
      for (std::uint64_t k = 0; k < n; ++k) {
        const double price = competing_price(curve, rng.uniform());
        const auto d = pick(slots, rng.uniform());
        if (!d.bid) continue;
        ++gs.bids;
        // Ties go to the bidder, matching the right-continuity of D.
        if (d.value + kBidTolerance >= price) {
          ++gs.wins;
          ++won[d.campaign];
          paid[d.campaign].add(price);
        }
      }
    }
    for (std::size_t i = 0; i < nc; ++i) {
      imp_sum[i].add(static_cast<double>(won[i]));
      cost_sum[i].add(paid[i].value());
    }
  }

  // Analytic means and per-replication variances.
  std::vector<double> var_imp(nc, 0.0), var_cost(nc, 0.0);
  for (std::size_t j = 0; j < ng; ++j) {
    const auto& curve = instance.group(j).curve;
    const double v = static_cast<double>(volume[j]);
    std::vector<double> p(nc, 0.0), m1(nc, 0.0), m2(nc, 0.0);
    for (const auto& [key, bids] : strategy) {
      if (key.group != j) continue;
      for (const auto& b : bids) {
        rep.campaigns[key.campaign].expected_impressions += b.fraction * curve.eval(b.bid);
        rep.campaigns[key.campaign].expected_cost += b.fraction * curve.win_cost(b.bid);
        if (v > 0.0) {
          p[key.campaign] += b.fraction * curve.eval(b.bid) / v;
          m1[key.campaign] += b.fraction * curve.win_cost(b.bid) / v;
          m2[key.campaign] += b.fraction * second_moment(curve, b.bid) / v;
        }
      }
    }
    for (std::size_t i = 0; i < nc; ++i) {
      if (options.poisson) {
        var_imp[i] += v * p[i];
        var_cost[i] += v * m2[i];
      } else {
        var_imp[i] += v * p[i] * (1.0 - p[i]);
        var_cost[i] += v * std::max(0.0, m2[i] - m1[i] * m1[i]);
      }
    }
  }

  const double R = static_cast<double>(options.replications);
  auto zscore = [](double mean, double expected, double se) {
    if (se > 0.0) return (mean - expected) / se;
    if (std::abs(mean - expected) <= 1e-9 * std::max(1.0, std::abs(expected))) return 0.0;
    return std::copysign(std::numeric_limits<double>::infinity(), mean - expected);
  };
  Accumulator total, expected_total;
  for (std::size_t i = 0; i < nc; ++i) {
    auto& c = rep.campaigns[i];
    c.mean_impressions = imp_sum[i].value() / R;
    c.mean_cost = cost_sum[i].value() / R;
    c.se_impressions = std::sqrt(std::max(0.0, var_imp[i]) / R);
    c.se_cost = std::sqrt(std::max(0.0, var_cost[i]) / R);
    c.z_impressions = zscore(c.mean_impressions, c.expected_impressions, c.se_impressions);
    c.z_cost = zscore(c.mean_cost, c.expected_cost, c.se_cost);
    total.add(c.mean_cost);
    expected_total.add(c.expected_cost);
  }
  rep.mean_total_cost = total.value();
  rep.expected_total_cost = expected_total.value();
  return rep;
}

SimReport run_simulation(const ProblemInstance& instance, const PureAllocation& strategy,
                         const SimOptions& options) {
  return run_simulation(instance, lift(strategy), options);
}

}  // namespace bidopt
