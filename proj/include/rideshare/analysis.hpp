#pragma once

// Platform-stage analyses: constant-response detection, collusion
// classification, tipping scans, unilateral deviations and grid-based
// epsilon-Nash certification.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rideshare/grid.hpp"
#include "rideshare/model.hpp"

namespace rideshare {

enum class CollusionTag { DoubleSided, SingleSidedWage, TrivialDegenerate, Competition };

inline const char* to_string(CollusionTag tag) {
  switch (tag) {
    case CollusionTag::DoubleSided: return "DoubleSided";
    case CollusionTag::SingleSidedWage: return "SingleSidedWage";
    case CollusionTag::TrivialDegenerate: return "TrivialDegenerate";
    case CollusionTag::Competition: return "Competition";
  }
  return "?";
}

inline std::optional<CollusionTag> collusion_tag_from_string(const std::string& s) {
  for (CollusionTag t : {CollusionTag::DoubleSided, CollusionTag::SingleSidedWage, CollusionTag::TrivialDegenerate,
                         CollusionTag::Competition})
    if (s == to_string(t)) return t;
  return std::nullopt;
}

/// Slack of each collusion condition; zero means the condition is exactly met.
struct CollusionResiduals {
  double rate_gap = 0.0;        // r_u - r_l
  double commission_gap = 0.0;  // c_u - c_l
  double margin_u = 0.0;        // c_u - g
  double margin_l = 0.0;        // c_l - g
  double headroom_u = 0.0;      // (r_p + 2 lambda) - r_u
  double headroom_l = 0.0;      // (r_p + 2 lambda) - r_l
};

struct CollusionClass {
  CollusionTag tag = CollusionTag::Competition;
  CollusionResiduals residuals;
};

/// Pure-strategy payoff difference, zero when drivers are indifferent
/// between serving only L and serving only U.
inline double balance_residual(const PlatformDecision& dec, const MarketParams& params) {
  return detail::balance(dec, params);
}

/// Flat driver payoff: zero curvature and balanced pure strategies.
inline bool is_constant_response(const PlatformDecision& dec, const MarketParams& params, double tol) {
  return detail::constant_response(dec, params, tol);
}

/// Classify a decision. Precedence: TrivialDegenerate, SingleSidedWage,
/// DoubleSided, Competition.
inline CollusionClass classify_collusion(const PlatformDecision& dec, const MarketParams& params, double tol) {
  const double upper = rate_upper_bound(params);
  CollusionClass out;
  auto& r = out.residuals;
  r.rate_gap = dec.r_u - dec.r_l;
  r.commission_gap = dec.c_u - dec.c_l;
  r.margin_u = dec.c_u - params.gas;
  r.margin_l = dec.c_l - params.gas;
  r.headroom_u = upper - dec.r_u;
  r.headroom_l = upper - dec.r_l;

  if (std::abs(r.headroom_u) <= tol && std::abs(r.headroom_l) <= tol)
    out.tag = CollusionTag::TrivialDegenerate;
  else if (std::abs(r.margin_u) <= tol && std::abs(r.margin_l) <= tol)
    out.tag = CollusionTag::SingleSidedWage;
  else if (std::abs(r.rate_gap) <= tol && std::abs(r.commission_gap) <= tol && r.margin_u > tol && r.headroom_u > tol)
    out.tag = CollusionTag::DoubleSided;
  else
    out.tag = CollusionTag::Competition;
  return out;
}

struct DominanceReport {
  double total = 0.0;         // A at which the scan ran
  double max_interior = 0.0;  // best value strictly inside (0, A)
  double argmax_interior = 0.0;
  double at_zero = 0.0;   // all drivers on L
  double at_total = 0.0;  // all drivers on U
  bool no_strict_mixed = true;
};

/// Scan allocation_value over `grid_points` evenly spaced a_u in [0, A].
inline DominanceReport mixed_dominance_scan(const PlatformDecision& dec, const MarketParams& params,
                                            std::size_t grid_points, double total) {
  const double upper = rate_upper_bound(params);
  if (dec.c_u < params.gas || dec.c_l < params.gas)
    throw DomainError("dominance scan requires commissions at or above gas cost");
  if (dec.r_u > upper || dec.r_l > upper) throw DomainError("dominance scan requires rates within the demand bound");
  if (grid_points < 3) throw DomainError("dominance scan needs at least 3 grid points");
  if (!(total > 0.0) || total > 1.0) throw DomainError("total availability must lie in (0, 1]");

  DominanceReport rep;
  rep.total = total;
  rep.at_zero = allocation_value(0.0, total, dec, params);
  rep.at_total = allocation_value(total, total, dec, params);
  rep.max_interior = -std::numeric_limits<double>::infinity();
  const double n = static_cast<double>(grid_points - 1);
  for (std::size_t k = 1; k + 1 < grid_points; ++k) {
    const double a_u = total * static_cast<double>(k) / n;
    const double v = allocation_value(a_u, total, dec, params);
    if (v > rep.max_interior) {
      rep.max_interior = v;
      rep.argmax_interior = a_u;
    }
  }
  rep.no_strict_mixed = rep.max_interior <= std::max(rep.at_zero, rep.at_total) + 1e-9;
  return rep;
}

/// Same scan at the equal-split participation level (A = 1 when that is zero).
inline DominanceReport mixed_dominance_scan(const PlatformDecision& dec, const MarketParams& params,
                                            std::size_t grid_points) {
  const double total = detail::equal_split_participation(dec, params);
  return mixed_dominance_scan(dec, params, grid_points, total > 0.0 ? total : 1.0);
}

struct DeviationReport {
  Platform deviator = Platform::U;
  double delta_r = 0.0;
  double delta_c = 0.0;
  PlatformDecision baseline_decision;
  PlatformDecision deviated_decision;
  StageOutcome before;
  StageOutcome after;
  double baseline_profit = 0.0;
  double deviated_profit = 0.0;
  double gain = 0.0;
  DriverAllocation post_alloc;
  bool tie = false;  // the deviation left drivers exactly indifferent
};

inline PlatformDecision apply_deviation(PlatformDecision dec, Platform who, double delta_r, double delta_c) {
  if (who == Platform::U) {
    dec.r_u += delta_r;
    dec.c_u += delta_c;
  } else {
    dec.r_l += delta_r;
    dec.c_l += delta_c;
  }
  return dec;
}

/// Profit change for `deviator` from a unilateral move, lower stages re-solved.
inline DeviationReport deviation_gain(const PlatformDecision& dec, const MarketParams& params, Platform deviator,
                                      double delta_r, double delta_c) {
  DeviationReport rep;
  rep.deviator = deviator;
  rep.delta_r = delta_r;
  rep.delta_c = delta_c;
  rep.baseline_decision = dec;
  rep.deviated_decision = apply_deviation(dec, deviator, delta_r, delta_c);
  if (rep.deviated_decision.rate(deviator) < 0.0 || rep.deviated_decision.commission(deviator) < 0.0)
    throw DomainError("deviation produces a negative rate or commission");
  rep.before = stage_outcome(dec, params);
  rep.after = stage_outcome(rep.deviated_decision, params);
  rep.baseline_profit = rep.before.profit(deviator);
  rep.deviated_profit = rep.after.profit(deviator);
  rep.gain = rep.deviated_profit - rep.baseline_profit;
  rep.post_alloc = rep.after.alloc;
  rep.tie = rep.after.tie;
  return rep;
}

/// Deviation grid for the platform stage.
struct NashGrid {
  GridAxis rate;
  GridAxis commission;
  DeviationSet moves = DeviationSet::Full;
  bool cap_commission_at_rate = false;  // skip deviations with c > r

  /// 101 points per variable over [0, r_p + 2 lambda] x [max(0, g - 0.5), r_p].
  static NashGrid defaults(const MarketParams& params) {
    return {GridAxis::with_points(0.0, rate_upper_bound(params), 101),
            GridAxis::with_points(std::max(0.0, params.gas - 0.5), params.transit_rate, 101)};
  }
};

struct NashCertificate {
  PlatformDecision point;
  double epsilon = 0.0;
  NashGrid grid;
  double baseline_profit_u = 0.0;
  double baseline_profit_l = 0.0;
  double max_gain_u = 0.0;
  double max_gain_l = 0.0;
  PlatformDecision best_deviation_u;  // decision reached by U's best grid deviation
  PlatformDecision best_deviation_l;
  // Best gains among deviations that move the commission, reported apart
  // from rate-only moves.
  double supply_gain_u = -std::numeric_limits<double>::infinity();
  double supply_gain_l = -std::numeric_limits<double>::infinity();
  std::size_t deviations_checked = 0;
  bool certified = false;
};

namespace detail {

struct PlatformScan {
  double max_gain = -std::numeric_limits<double>::infinity();
  double supply_gain = -std::numeric_limits<double>::infinity();
  PlatformDecision best;
  std::size_t checked = 0;
};

inline PlatformScan scan_deviations(const PlatformDecision& dec, const MarketParams& params, Platform who,
                                    const NashGrid& grid, double baseline) {
  std::vector<double> rates;
  std::vector<double> commissions;
  if (grid.moves == DeviationSet::CommissionsOnly)
    rates.push_back(dec.rate(who));
  else
    for (std::size_t i = 0; i < grid.rate.size(); ++i) rates.push_back(grid.rate.at(i));
  if (grid.moves == DeviationSet::RatesOnly)
    commissions.push_back(dec.commission(who));
  else
    for (std::size_t i = 0; i < grid.commission.size(); ++i) commissions.push_back(grid.commission.at(i));

  PlatformScan scan;
  for (double r : rates) {
    for (double c : commissions) {
      if (r < 0.0 || c < 0.0) continue;
      if (grid.cap_commission_at_rate && c > r) continue;
      PlatformDecision trial = dec;
      if (who == Platform::U) {
        trial.r_u = r;
        trial.c_u = c;
      } else {
        trial.r_l = r;
        trial.c_l = c;
      }
      const double gain = stage_outcome(trial, params).profit(who) - baseline;
      ++scan.checked;
      if (gain > scan.max_gain) {
        scan.max_gain = gain;
        scan.best = trial;
      }
      if (std::abs(c - dec.commission(who)) > 1e-12) scan.supply_gain = std::max(scan.supply_gain, gain);
    }
  }
  return scan;
}

}  // namespace detail

/// Certify `dec` as an epsilon-Nash point of the platform stage by scanning
/// every unilateral grid deviation through the lower-stage response.
inline NashCertificate certify_epsilon_nash(const PlatformDecision& dec, const MarketParams& params,
                                            const NashGrid& grid, double epsilon) {
  if (!(epsilon > 0.0)) throw DomainError("epsilon must be positive");
  if (grid.moves != DeviationSet::CommissionsOnly) grid.rate.validate("rate grid");
  if (grid.moves != DeviationSet::RatesOnly) grid.commission.validate("commission grid");
  const double slack = 1e-9;
  if (grid.rate.low < -slack || grid.rate.high > rate_upper_bound(params) + slack)
    throw DomainError("rate grid must lie within [0, r_p + 2 lambda]");
  if (grid.moves != DeviationSet::RatesOnly &&
      (grid.commission.low < params.gas - 0.5 - slack || grid.commission.high > params.transit_rate + slack))
    throw DomainError("commission grid must lie within [g - 0.5, r_p]");

  NashCertificate cert;
  cert.point = dec;
  cert.epsilon = epsilon;
  cert.grid = grid;
  const StageOutcome base = stage_outcome(dec, params);
  cert.baseline_profit_u = base.profit_u;
  cert.baseline_profit_l = base.profit_l;
  const auto u = detail::scan_deviations(dec, params, Platform::U, grid, base.profit_u);
  const auto l = detail::scan_deviations(dec, params, Platform::L, grid, base.profit_l);
  if (u.checked == 0 || l.checked == 0) throw DomainError("deviation grid is empty");
  cert.max_gain_u = u.max_gain;
  cert.max_gain_l = l.max_gain;
  cert.best_deviation_u = u.best;
  cert.best_deviation_l = l.best;
  cert.supply_gain_u = u.supply_gain;
  cert.supply_gain_l = l.supply_gain;
  cert.deviations_checked = u.checked + l.checked;
  cert.certified = std::max(cert.max_gain_u, cert.max_gain_l) <= epsilon;
  return cert;
}

/// Raised when best-response iteration revisits a state without settling.
class CycleError : public DomainError {
 public:
  CycleError(const std::string& what, std::vector<std::pair<double, double>> cycle)
      : DomainError(what), cycle_(std::move(cycle)) {}
  const std::vector<std::pair<double, double>>& cycle() const { return cycle_; }

 private:
  std::vector<std::pair<double, double>> cycle_;
};

/// Profit-maximizing rate for `who` on the grid with commissions pinned;
/// ties go to the lowest rate.
inline double best_rate_response(const PlatformDecision& dec, const MarketParams& params, Platform who,
                                 const GridAxis& rate_grid) {
  double best_rate = rate_grid.at(0);
  double best_profit = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < rate_grid.size(); ++i) {
    PlatformDecision trial = dec;
    (who == Platform::U ? trial.r_u : trial.r_l) = rate_grid.at(i);
    const double profit = stage_outcome(trial, params).profit(who);
    if (profit > best_profit) {
      best_profit = profit;
      best_rate = rate_grid.at(i);
    }
  }
  return best_rate;
}

/// Default rate grid: [0, r_p + 2 lambda] in steps of 0.01.
inline GridAxis default_rate_grid(const MarketParams& params) { return {0.0, rate_upper_bound(params), 0.01}; }

/// Commissions pinned at gas cost, rates found by simultaneous best-response
/// iteration on the grid from its midpoint. Returns the symmetric fixed point.
inline PlatformDecision find_rate_equilibrium_under_wage_collusion(const MarketParams& params,
                                                                   const GridAxis& rate_grid,
                                                                   std::size_t max_iterations = 200) {
  params.validate();
  rate_grid.validate("rate grid");
  if (rate_grid.low < 0.0 || rate_grid.high > rate_upper_bound(params) + 1e-9)
    throw DomainError("rate grid must lie within [0, r_p + 2 lambda]");

  const double g = params.gas;
  const double start = rate_grid.at(rate_grid.size() / 2);
  std::pair<double, double> state{start, start};
  std::map<std::pair<double, double>, std::size_t> seen{{state, 0}};
  std::vector<std::pair<double, double>> trail{state};
  for (std::size_t it = 1; it <= max_iterations; ++it) {
    const PlatformDecision current{state.first, g, state.second, g};
    const std::pair<double, double> next{best_rate_response(current, params, Platform::U, rate_grid),
                                         best_rate_response(current, params, Platform::L, rate_grid)};
    if (next == state) {
      const PlatformDecision eq = current;
      const StageOutcome out = stage_outcome(eq, params);
      if (!(out.profit_u > 0.0) || !(out.profit_l > 0.0))
        throw DomainError("no profitable rate exists under wage collusion");
      if (eq.r_u != eq.r_l) throw DomainError("best-response iteration settled on an asymmetric point");
      return eq;
    }
    if (auto hit = seen.find(next); hit != seen.end())
      throw CycleError("best-response iteration cycles",
                       std::vector<std::pair<double, double>>(trail.begin() + static_cast<std::ptrdiff_t>(hit->second),
                                                              trail.end()));
    seen.emplace(next, it);
    trail.push_back(next);
    state = next;
  }
  throw CycleError("best-response iteration did not settle within the iteration cap", trail);
}

/// The zero-profit point r = c on both platforms at which no deviation with
/// c <= r wins drivers. A single-platform driver earns
/// min(1, (r_p - x)/(2 lambda)) (x - g) at r = c = x, maximized at
/// x = max((r_p + g)/2, r_p - 2 lambda).
inline PlatformDecision price_war_terminus(const MarketParams& params) {
  const double r_p = params.transit_rate;
  const double x = r_p <= params.gas ? r_p : std::max(0.5 * (r_p + params.gas), r_p - 2.0 * params.lambda);
  return {x, x, x, x};
}

}  // namespace rideshare
