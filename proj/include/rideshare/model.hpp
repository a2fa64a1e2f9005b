#pragma once

// Ridesharing duopoly: two platforms (U, L) set rates and commissions,
// drivers allocate availability across them, passengers split between the
// platforms and public transit. Trip distance and transit availability are
// normalized to 1.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace rideshare {

/// Thrown when an input falls outside the model's domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Thrown when a platform's rate leaves it with no demand in any supply market.
class ZeroDemandError : public DomainError {
 public:
  using DomainError::DomainError;
};

enum class Platform { U, L };

inline const char* to_string(Platform p) { return p == Platform::U ? "U" : "L"; }

/// Which platform controls a deviation or certification may move.
enum class DeviationSet { Full, RatesOnly, CommissionsOnly };

/// Exogenous environment.
struct MarketParams {
  double lambda = 1.0;        // wait-cost multiplier
  double gas = 0.0;           // driver cost per mile
  double transit_rate = 0.0;  // public transit price per mile

  static MarketParams make(double lambda, double gas, double transit_rate) {
    MarketParams p{lambda, gas, transit_rate};
    p.validate();
    return p;
  }

  void validate() const {
    if (!std::isfinite(lambda) || !(lambda > 0.0)) throw DomainError("lambda must be finite and > 0");
    if (!std::isfinite(gas) || gas < 0.0) throw DomainError("gas must be finite and >= 0");
    if (!std::isfinite(transit_rate) || transit_rate < 0.0)
      throw DomainError("transit_rate must be finite and >= 0");
    // Otherwise every profitable rate is priced out by transit.
    if (!(transit_rate > gas - 2.0 * lambda))
      throw DomainError("transit_rate must exceed gas - 2*lambda");
  }
};

/// Platform controls, currency per mile.
struct PlatformDecision {
  double r_u = 0.0;
  double c_u = 0.0;
  double r_l = 0.0;
  double c_l = 0.0;

  double rate(Platform p) const { return p == Platform::U ? r_u : r_l; }
  double commission(Platform p) const { return p == Platform::U ? c_u : c_l; }

  void validate() const {
    for (double v : {r_u, c_u, r_l, c_l})
      if (!std::isfinite(v) || v < 0.0) throw DomainError("rates and commissions must be finite and >= 0");
  }

  /// Same decision with the two platforms' controls exchanged.
  PlatformDecision mirrored() const { return {r_l, c_l, r_u, c_u}; }

  friend bool operator==(const PlatformDecision&, const PlatformDecision&) = default;
};

struct DriverAllocation {
  double a_u = 0.0;
  double a_l = 0.0;

  double total() const { return a_u + a_l; }
  friend bool operator==(const DriverAllocation&, const DriverAllocation&) = default;
};

struct PassengerSplit {
  double p_u = 0.0;
  double p_l = 0.0;
  double p_p = 1.0;

  double platform_share() const { return p_u + p_l; }
};

struct StageOutcome {
  PassengerSplit split;
  DriverAllocation alloc;
  double driver_profit = 0.0;
  double profit_u = 0.0;
  double profit_l = 0.0;
  bool tie = false;  // drivers indifferent between the two monopolies; resolved to U

  double profit(Platform p) const { return p == Platform::U ? profit_u : profit_l; }
};

enum class ParticipationMode { MonopolyU, MonopolyL, EqualSplit };

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Tolerance used by the driver stage to recognize a flat allocation payoff.
inline constexpr double kConstantResponseTol = 1e-9;
/// Slack on the matching constraint.
inline constexpr double kMatchingSlack = 1e-9;

/// Total passenger cost; +infinity when a platform with no drivers gets demand.
inline double passenger_cost(const PassengerSplit& split, const DriverAllocation& alloc,
                             const PlatformDecision& dec, const MarketParams& params) {
  const double lam = params.lambda;
  double cost = split.p_p * (params.transit_rate + lam * split.p_p);
  if (split.p_u > 0.0) {
    if (alloc.a_u <= 0.0) return kInfinity;
    cost += split.p_u * (dec.r_u + lam * split.p_u / alloc.a_u);
  }
  if (split.p_l > 0.0) {
    if (alloc.a_l <= 0.0) return kInfinity;
    cost += split.p_l * (dec.r_l + lam * split.p_l / alloc.a_l);
  }
  return cost;
}

/// Unique minimizer of passenger_cost over the simplex.
///
/// On a support S the KKT conditions equalize marginal costs
/// r_i + 2*lambda*p_i/a_i = mu, so p_i = a_i*(mu - r_i)/(2*lambda) and
/// mu = (2*lambda + sum a_i r_i) / sum a_i. Options outside S need r_j >= mu.
/// Supports are tried smallest first, so a constraint that is exactly tight
/// resolves to an exact zero share.
inline PassengerSplit passenger_best_response(const DriverAllocation& alloc, const PlatformDecision& dec,
                                              const MarketParams& params) {
  const std::array<double, 3> avail{std::max(alloc.a_u, 0.0), std::max(alloc.a_l, 0.0), 1.0};
  const std::array<double, 3> rate{dec.r_u, dec.r_l, params.transit_rate};
  const double two_lambda = 2.0 * params.lambda;
  const double scale = 1.0 + std::max({std::abs(rate[0]), std::abs(rate[1]), std::abs(rate[2]), two_lambda});
  const double kkt_tol = 1e-13 * scale;

  // Nonempty subsets of {U, L, P} ordered by size.
  static constexpr std::array<unsigned, 7> kSupports{0b100, 0b001, 0b010, 0b101, 0b110, 0b011, 0b111};

  std::array<double, 3> share{0.0, 0.0, 1.0};
  bool found = false;
  for (unsigned support : kSupports) {
    double avail_sum = 0.0;
    double weighted = 0.0;
    bool usable = true;
    for (int i = 0; i < 3; ++i) {
      if (!(support >> i & 1u)) continue;
      if (avail[i] <= 0.0) usable = false;  // infinite wait cost
      avail_sum += avail[i];
      weighted += avail[i] * rate[i];
    }
    if (!usable) continue;
    const double mu = (two_lambda + weighted) / avail_sum;
    std::array<double, 3> candidate{0.0, 0.0, 0.0};
    bool kkt = true;
    for (int i = 0; i < 3 && kkt; ++i) {
      if (support >> i & 1u) {
        candidate[i] = avail[i] * (mu - rate[i]) / two_lambda;
        if (candidate[i] < -kkt_tol) kkt = false;
      } else if (avail[i] > 0.0 && rate[i] < mu - kkt_tol) {
        kkt = false;
      }
    }
    if (kkt) {
      share = candidate;
      found = true;
      break;
    }
  }
  if (!found) {
    // Unreachable for lambda > 0: strict convexity gives exactly one KKT point.
    throw std::logic_error("passenger stage: no KKT point found");
  }

  double total = 0.0;
  for (double& s : share) {
    s = std::clamp(s, 0.0, 1.0);
    total += s;
  }
  for (double& s : share) s /= total;
  // Put the rounding residue on the largest share so the sum is 1.
  const auto largest = static_cast<std::size_t>(std::max_element(share.begin(), share.end()) - share.begin());
  double others = 0.0;
  for (std::size_t i = 0; i < 3; ++i)
    if (i != largest) others += share[i];
  share[largest] = std::max(0.0, 1.0 - others);
  return {share[0], share[1], share[2]};
}

/// Rate above which a platform gets no demand even with every driver.
inline double rate_upper_bound(const MarketParams& params) {
  return params.transit_rate + 2.0 * params.lambda;
}

/// Rate below which transit share is already zero at total availability A.
inline double rate_lower_bound(const DriverAllocation& alloc, const MarketParams& params) {
  const double total = alloc.total();
  if (!(total > 0.0)) throw DomainError("rate lower bound undefined for zero total availability");
  return params.transit_rate - 2.0 * params.lambda / total;
}

/// Driver payoff as a function of a_u with a_l = A - a_u, using the interior
/// passenger shares. Quadratic in a_u.
inline double allocation_value(double a_u, double total, const PlatformDecision& dec, const MarketParams& params) {
  const double lam = params.lambda;
  const double rp = params.transit_rate;
  const double g = params.gas;
  const double a_l = total - a_u;
  const double denom = 2.0 * lam * (total + 1.0);
  const double share_u = (2.0 * lam * a_u + a_l * a_u * (dec.r_l - dec.r_u) + a_u * (rp - dec.r_u)) / denom;
  const double share_l = (2.0 * lam * a_l + a_l * a_u * (dec.r_u - dec.r_l) + a_l * (rp - dec.r_l)) / denom;
  return share_u * (dec.c_u - g) + share_l * (dec.c_l - g);
}

/// Second derivative of allocation_value in a_u.
inline double allocation_hessian(const PlatformDecision& dec, const MarketParams& params, double total) {
  return (dec.c_l - dec.c_u) * (dec.r_l - dec.r_u) / (params.lambda * (total + 1.0));
}

namespace detail {

inline double clamp_unit(double v) { return std::clamp(v, 0.0, 1.0); }

/// Payoff difference between the all-L and all-U pure strategies, up to a
/// positive factor.
inline double balance(const PlatformDecision& dec, const MarketParams& params) {
  const double k = 2.0 * params.lambda + params.transit_rate;
  return (k - dec.r_l) * (dec.c_l - params.gas) - (k - dec.r_u) * (dec.c_u - params.gas);
}

/// Largest A in [0, 1] with A <= p_u + p_l, drivers on a single platform.
inline double monopoly_participation(double rate, const MarketParams& params) {
  return clamp_unit((params.transit_rate - rate) / (2.0 * params.lambda));
}

inline double equal_split_demand(double total, const PlatformDecision& dec, const MarketParams& params) {
  return passenger_best_response({total / 2.0, total / 2.0}, dec, params).platform_share();
}

/// Largest A in [0, 1] with A <= p_u + p_l under a_u = a_l = A/2.
inline double equal_split_participation(const PlatformDecision& dec, const MarketParams& params) {
  const double closed =
      clamp_unit((2.0 * params.transit_rate - dec.r_u - dec.r_l) / (4.0 * params.lambda));
  const double demand = equal_split_demand(closed, dec, params);
  const bool consistent = closed >= 1.0 ? demand >= closed - 1e-12 : std::abs(demand - closed) <= 1e-12;
  if (consistent) return closed;

  // A face of the passenger simplex is active (very unequal rates); fall back
  // to bisection on demand(A) - A, which is positive below the fixed point.
  if (equal_split_demand(1.0, dec, params) >= 1.0) return 1.0;
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (equal_split_demand(mid, dec, params) >= mid)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

/// Flat allocation payoff: zero curvature and equal pure-strategy payoffs.
inline bool constant_response(const PlatformDecision& dec, const MarketParams& params, double tol) {
  const double total = equal_split_participation(dec, params);
  return std::abs(allocation_hessian(dec, params, total)) <= tol && std::abs(balance(dec, params)) <= tol;
}

}  // namespace detail

/// Full-participation total availability for the given driver mode.
inline double participation_fixed_point(const PlatformDecision& dec, const MarketParams& params,
                                        ParticipationMode mode) {
  const double g = params.gas;
  switch (mode) {
    case ParticipationMode::MonopolyU:
    case ParticipationMode::MonopolyL: {
      const Platform p = mode == ParticipationMode::MonopolyU ? Platform::U : Platform::L;
      if (dec.rate(p) > rate_upper_bound(params))
        throw ZeroDemandError(std::string("platform ") + to_string(p) + " rate exceeds the demand upper bound");
      if (dec.commission(p) < g) throw DomainError("negative driver margin on the active platform");
      return detail::monopoly_participation(dec.rate(p), params);
    }
    case ParticipationMode::EqualSplit:
      if (dec.c_u < g || dec.c_l < g) throw DomainError("negative driver margin on an active platform");
      return detail::equal_split_participation(dec, params);
  }
  throw std::logic_error("unknown participation mode");
}

struct DriverChoice {
  DriverAllocation alloc;
  bool tie = false;
  bool constant_response = false;
};

/// Driver stage with diagnostics. Flat payoff -> equal split at full
/// participation; otherwise the better single-platform strategy, ties to U.
inline DriverChoice driver_choice(const PlatformDecision& dec, const MarketParams& params) {
  const double margin_u = dec.c_u - params.gas;
  const double margin_l = dec.c_l - params.gas;
  if (margin_u < 0.0 && margin_l < 0.0) return {};

  if (detail::constant_response(dec, params, kConstantResponseTol)) {
    const double total = detail::equal_split_participation(dec, params);
    return {{total / 2.0, total / 2.0}, false, true};
  }

  const double total_u = detail::monopoly_participation(dec.r_u, params);
  const double total_l = detail::monopoly_participation(dec.r_l, params);
  // Realized shares; these equal A* unless A* is capped at 1.
  const double payoff_u = passenger_best_response({total_u, 0.0}, dec, params).p_u * margin_u;
  const double payoff_l = passenger_best_response({0.0, total_l}, dec, params).p_l * margin_l;
  if (payoff_u < 0.0 && payoff_l < 0.0) return {};

  const bool tie = std::abs(payoff_u - payoff_l) <= 1e-12 && (total_u > 0.0 || total_l > 0.0);
  if (payoff_u >= payoff_l || tie) return {{total_u, 0.0}, tie, false};
  return {{0.0, total_l}, false, false};
}

inline DriverAllocation driver_best_response(const PlatformDecision& dec, const MarketParams& params) {
  return driver_choice(dec, params).alloc;
}

/// Matching constraint a_u + a_l <= p_u + p_l at the induced passenger split.
inline bool validate_matching(const DriverAllocation& alloc, const PlatformDecision& dec,
                              const MarketParams& params) {
  const PassengerSplit split = passenger_best_response(alloc, dec, params);
  return alloc.total() <= split.platform_share() + kMatchingSlack;
}

/// Outcome of the lower two stages for a platform decision.
inline StageOutcome stage_outcome(const PlatformDecision& dec, const MarketParams& params) {
  dec.validate();
  const DriverChoice choice = driver_choice(dec, params);
  StageOutcome out;
  out.alloc = choice.alloc;
  out.tie = choice.tie;
  out.split = passenger_best_response(out.alloc, dec, params);
  out.profit_u = out.split.p_u * (dec.r_u - dec.c_u);
  out.profit_l = out.split.p_l * (dec.r_l - dec.c_l);
  out.driver_profit = out.split.p_u * (dec.c_u - params.gas) + out.split.p_l * (dec.c_l - params.gas);
  return out;
}

}  // namespace rideshare
