#pragma once

// Randomized verification suites pairing the closed forms with the oracles.
// Deterministic for a given seed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "rideshare/analysis.hpp"
#include "rideshare/model.hpp"
#include "rideshare/oracle.hpp"

namespace rideshare::suites {

struct SuiteCheck {
  std::string name;
  std::size_t cases = 0;
  std::size_t passed = 0;
  double worst = 0.0;      // worst residual observed
  double threshold = 0.0;  // pass threshold for the residual
  bool ok() const { return passed == cases; }
};

struct SuiteResult {
  std::string suite;
  std::vector<SuiteCheck> checks;
  std::vector<std::string> notes;
  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const SuiteCheck& c) { return c.ok(); });
  }
};

struct SuiteConfig {
  std::uint64_t seed = 1;
  std::size_t cases = 1000;
  double tol = 1e-9;
  double resolution = 0.01;
  MarketParams market = {1.0, 1.0, 3.0};
  std::optional<PlatformDecision> decision;  // constant-response suite checks it when present
};

inline constexpr std::array<const char*, 5> kSuiteNames{"passenger", "driver", "theorem1", "constant-response", "all"};

inline bool is_suite_name(const std::string& name) {
  return std::find(kSuiteNames.begin(), kSuiteNames.end(), name) != kSuiteNames.end();
}

// ---- random inputs ---------------------------------------------------------

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  bool chance(double p) { return uniform(0.0, 1.0) < p; }

  /// lambda in [0.1, 5], transit rate in [1, 4], gas in [0, 1].
  MarketParams market() { return {uniform(0.1, 5.0), uniform(0.0, 1.0), uniform(1.0, 4.0)}; }

  /// Rates in [0, r_p + 2 lambda], commissions in [g, g + 1].
  PlatformDecision decision(const MarketParams& m) {
    const double upper = rate_upper_bound(m);
    return {uniform(0.0, upper), uniform(m.gas, m.gas + 1.0), uniform(0.0, upper), uniform(m.gas, m.gas + 1.0)};
  }

  /// Availabilities in [0, 1], each exactly zero 10% of the time.
  DriverAllocation allocation() {
    return {chance(0.1) ? 0.0 : uniform(0.0, 1.0), chance(0.1) ? 0.0 : uniform(0.0, 1.0)};
  }

 private:
  std::mt19937_64 rng_;
};

inline double max_component_gap(const PassengerSplit& a, const PassengerSplit& b) {
  return std::max({std::abs(a.p_u - b.p_u), std::abs(a.p_l - b.p_l), std::abs(a.p_p - b.p_p)});
}

/// Largest spread of marginal cost r_i + 2 lambda p_i / a_i across options
/// with positive share.
inline double marginal_cost_spread(const PassengerSplit& s, const DriverAllocation& alloc,
                                   const PlatformDecision& dec, const MarketParams& m) {
  double lo = kInfinity;
  double hi = -kInfinity;
  auto add = [&](double share, double avail, double rate) {
    if (share <= 0.0) return;
    const double mc = rate + 2.0 * m.lambda * share / avail;
    lo = std::min(lo, mc);
    hi = std::max(hi, mc);
  };
  add(s.p_u, alloc.a_u, dec.r_u);
  add(s.p_l, alloc.a_l, dec.r_l);
  add(s.p_p, 1.0, m.transit_rate);
  return hi > lo ? hi - lo : 0.0;
}

/// max - min of allocation_value over `points` evenly spaced a_u in [0, A].
inline double allocation_spread(const PlatformDecision& dec, const MarketParams& m, double total,
                                std::size_t points = 100) {
  double lo = kInfinity;
  double hi = -kInfinity;
  for (std::size_t k = 0; k < points; ++k) {
    const double v =
        allocation_value(total * static_cast<double>(k) / static_cast<double>(points - 1), total, dec, m);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return hi - lo;
}

inline void record(SuiteCheck& c, bool pass, double residual) {
  ++c.cases;
  if (pass) ++c.passed;
  c.worst = std::max(c.worst, residual);
}

// ---- suites ----------------------------------------------------------------

/// Closed-form passenger split against the simplex-grid oracle.
inline SuiteResult run_passenger_suite(const SuiteConfig& cfg) {
  SuiteResult res{"passenger", {}, {}};
  SuiteCheck agree{"oracle agreement (max component gap)", 0, 0, 0.0, 2.0 * cfg.resolution};
  SuiteCheck cost{"cost not above oracle cost", 0, 0, 0.0, 1e-10};
  SuiteCheck norm{"shares sum to 1 and lie in [0,1]", 0, 0, 0.0, 1e-12};
  SuiteCheck fonc{"marginal costs equalized on the support", 0, 0, 0.0, 1e-8};
  Sampler rng(cfg.seed);
  for (std::size_t i = 0; i < cfg.cases; ++i) {
    const MarketParams m = rng.market();
    const double upper = rate_upper_bound(m);
    const PlatformDecision dec{rng.uniform(0.0, upper), 0.0, rng.uniform(0.0, upper), 0.0};
    const DriverAllocation alloc = rng.allocation();
    const PassengerSplit closed = passenger_best_response(alloc, dec, m);
    const PassengerSplit grid = oracle::passenger_oracle(alloc, dec, m, cfg.resolution);

    const double gap = max_component_gap(closed, grid);
    record(agree, gap <= agree.threshold, gap);

    const double c_closed = oracle::direct_passenger_cost(closed.p_u, closed.p_l, closed.p_p, alloc, dec, m);
    const double c_grid = oracle::direct_passenger_cost(grid.p_u, grid.p_l, grid.p_p, alloc, dec, m);
    const double excess = std::max(0.0, c_closed - c_grid);
    record(cost, excess <= cost.threshold, excess);

    const double sum_err = std::abs(closed.p_u + closed.p_l + closed.p_p - 1.0);
    const bool in_box = std::min({closed.p_u, closed.p_l, closed.p_p}) >= 0.0 &&
                        std::max({closed.p_u, closed.p_l, closed.p_p}) <= 1.0;
    record(norm, sum_err <= norm.threshold && in_box, sum_err);

    const double spread = marginal_cost_spread(closed, alloc, dec, m);
    record(fonc, spread <= fonc.threshold, spread);
  }
  res.checks = {agree, cost, norm, fonc};
  return res;
}

/// Driver best response against the exhaustive driver oracle.
///
/// Near-ties and allocations finer than the oracle grid are skipped. When the
/// supports differ, the oracle's optimum must be a mixed allocation that beats
/// both monopolies because the better single-platform strategy at the same
/// total is ruled out by the matching constraint; those are reported as
/// matching gaps. Any other disagreement fails.
inline SuiteResult run_driver_suite(const SuiteConfig& cfg) {
  SuiteResult res{"driver", {}, {}};
  SuiteCheck support{"support agreement or classified disagreement", 0, 0, 0.0, 0.0};
  std::size_t skipped = 0;
  std::size_t gaps = 0;
  std::size_t value_ties = 0;
  std::size_t model_better = 0;
  std::size_t faces = 0;
  Sampler rng(cfg.seed);
  const double h = cfg.resolution;
  for (std::size_t i = 0; i < cfg.cases; ++i) {
    const MarketParams m = rng.market();
    const PlatformDecision dec = rng.decision(m);
    const DriverChoice model = driver_choice(dec, m);

    const double total_u = detail::monopoly_participation(dec.r_u, m);
    const double total_l = detail::monopoly_participation(dec.r_l, m);
    const double margin_u = dec.c_u - m.gas;
    const double margin_l = dec.c_l - m.gas;
    const double pay_u = passenger_best_response({total_u, 0.0}, dec, m).p_u * margin_u;
    const double pay_l = passenger_best_response({0.0, total_l}, dec, m).p_l * margin_l;
    const bool near_tie = std::abs(pay_u - pay_l) <= 2.0 * h * std::max(margin_u, margin_l);
    const bool below_grid = (model.alloc.a_u > 0.0 && model.alloc.a_u < h) || (model.alloc.a_l > 0.0 && model.alloc.a_l < h);
    if (model.tie || model.constant_response || near_tie || below_grid) {
      ++skipped;
      continue;
    }

    const oracle::DriverOracleResult orc = oracle::driver_oracle_search(dec, m, h);
    const bool same = (model.alloc.a_u > 0.0) == (orc.alloc.a_u > 0.0) &&
                      (model.alloc.a_l > 0.0) == (orc.alloc.a_l > 0.0);
    if (same) {
      record(support, true, 0.0);
      continue;
    }
    const double model_best = std::max(pay_u, pay_l);
    if (std::abs(orc.profit - model_best) <= 1e-9) {
      ++value_ties;
      record(support, true, 0.0);
      continue;
    }
    if (orc.profit <= model_best + 1e-9) {
      ++model_better;
      record(support, true, 0.0);
      continue;
    }
    bool explained = false;
    if (orc.alloc.a_u > 0.0 && orc.alloc.a_l > 0.0) {
      const double total = orc.alloc.total();
      const PassengerSplit on_u = passenger_best_response({total, 0.0}, dec, m);
      const PassengerSplit on_l = passenger_best_response({0.0, total}, dec, m);
      const bool u_better = on_u.p_u * margin_u >= on_l.p_l * margin_l;
      const double share = u_better ? on_u.p_u : on_l.p_l;
      if (total > share + kMatchingSlack) {
        ++gaps;
        explained = true;
      } else if (std::abs(orc.profit - allocation_value(orc.alloc.a_u, total, dec, m)) > 1e-9) {
        ++faces;
        explained = true;
      }
    }
    record(support, explained, explained ? 0.0 : orc.profit - model_best);
  }
  res.checks = {support};
  res.notes.push_back("skipped (ties, near-ties, sub-grid allocations): " + std::to_string(skipped));
  res.notes.push_back("equal payoff, different support: " + std::to_string(value_ties));
  res.notes.push_back("model beats the grid oracle: " + std::to_string(model_better));
  res.notes.push_back("matching gaps (better endpoint infeasible): " + std::to_string(gaps));
  res.notes.push_back("passenger face active at the oracle point: " + std::to_string(faces));
  return res;
}

/// No interior allocation beats the better pure strategy at fixed A.
inline SuiteResult run_theorem1_suite(const SuiteConfig& cfg) {
  SuiteResult res{"theorem1", {}, {}};
  SuiteCheck dom{"no strict mixed dominance (101-point scan)", 0, 0, 0.0, 1e-9};
  Sampler rng(cfg.seed);
  for (std::size_t i = 0; i < cfg.cases; ++i) {
    const MarketParams m = rng.market();
    const PlatformDecision dec = rng.decision(m);
    const double total = rng.uniform(0.01, 1.0);
    const DominanceReport rep = mixed_dominance_scan(dec, m, 101, total);
    const double excess = rep.max_interior - std::max(rep.at_zero, rep.at_total);
    record(dom, rep.no_strict_mixed, std::max(0.0, excess));
  }
  res.checks = {dom};
  return res;
}

/// Constant-response conditions against numerical flatness of the driver
/// payoff: on a 10^4 decision grid over the scenario market, and for the
/// scenario decision when one is given.
inline SuiteResult run_constant_response_suite(const SuiteConfig& cfg) {
  SuiteResult res{"constant-response", {}, {}};
  const MarketParams& m = cfg.market;
  const double upper = rate_upper_bound(m);

  if (cfg.decision) {
    const PlatformDecision& dec = *cfg.decision;
    const bool constant = is_constant_response(dec, m, cfg.tol);
    const CollusionTag tag = classify_collusion(dec, m, cfg.tol).tag;
    const double spread = allocation_spread(dec, m, 1.0);
    SuiteCheck flat{"scenario decision: allocation payoff is flat", 0, 0, 0.0, 10.0 * cfg.tol};
    record(flat, spread <= flat.threshold, spread);
    SuiteCheck consistent{"scenario decision: classifier consistent with constant-response test", 0, 0, 0.0, 0.0};
    const bool tag_constant = tag != CollusionTag::Competition;
    const bool spread_ok = constant ? spread <= 10.0 * cfg.tol : true;
    record(consistent, constant == tag_constant && spread_ok, constant == tag_constant ? 0.0 : 1.0);
    res.checks.push_back(flat);
    res.checks.push_back(consistent);
    res.notes.push_back(std::string("scenario decision: tag ") + to_string(tag) + ", constant-response " +
                        (constant ? "yes" : "no") + ", spread " + std::to_string(spread));
  }

  SuiteCheck equiv{"grid: flat (spread <= 1e-8) iff DoubleSided or SingleSidedWage", 0, 0, 0.0, 1e-8};
  SuiteCheck sep{"grid: competition with |balance| > 1e-6 has spread > 1e-6", 0, 0, 0.0, 1e-6};
  std::array<double, 10> rates{};
  std::array<double, 10> comms{};
  for (std::size_t k = 0; k < 10; ++k) {
    rates[k] = upper * static_cast<double>(k) / 10.0;
    comms[k] = m.gas + 0.1 * static_cast<double>(k);
  }
  for (double r_u : rates)
    for (double c_u : comms)
      for (double r_l : rates)
        for (double c_l : comms) {
          const PlatformDecision dec{r_u, c_u, r_l, c_l};
          const CollusionTag tag = classify_collusion(dec, m, cfg.tol).tag;
          const double spread = allocation_spread(dec, m, 1.0);
          const bool flat = spread <= 1e-8;
          const bool colluding = tag == CollusionTag::DoubleSided || tag == CollusionTag::SingleSidedWage;
          record(equiv, flat == colluding, flat == colluding ? 0.0 : spread);
          if (tag == CollusionTag::Competition && std::abs(balance_residual(dec, m)) > 1e-6)
            record(sep, spread > 1e-6, spread > 1e-6 ? 0.0 : 1e-6 - spread);
        }
  res.checks.push_back(equiv);
  res.checks.push_back(sep);
  return res;
}

inline std::vector<SuiteResult> run_suite(const std::string& name, const SuiteConfig& cfg) {
  std::vector<SuiteResult> out;
  if (name == "passenger" || name == "all") out.push_back(run_passenger_suite(cfg));
  if (name == "driver" || name == "all") out.push_back(run_driver_suite(cfg));
  if (name == "theorem1" || name == "all") out.push_back(run_theorem1_suite(cfg));
  if (name == "constant-response" || name == "all") out.push_back(run_constant_response_suite(cfg));
  return out;
}

}  // namespace rideshare::suites
