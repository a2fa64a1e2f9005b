#pragma once

// Brute-force validators. The passenger oracle shares no code with the
// closed-form solver; the driver oracle reuses the passenger closed form
// (already checked against the passenger oracle) and searches the driver
// allocation space exhaustively.

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "rideshare/model.hpp"

namespace rideshare::oracle {

inline void check_resolution(double resolution) {
  if (!(resolution > 0.0) || resolution > 0.1) throw DomainError("oracle resolution must lie in (0, 0.1]");
}

/// Passenger cost written out option by option; infinite when a platform
/// without drivers carries demand.
inline double direct_passenger_cost(double p_u, double p_l, double p_p, const DriverAllocation& alloc,
                                    const PlatformDecision& dec, const MarketParams& params) {
  auto option = [&](double share, double avail, double rate) {
    if (share == 0.0) return 0.0;
    if (avail == 0.0) return std::numeric_limits<double>::infinity();
    const double wait = params.lambda * share / avail;
    return share * rate + share * wait;
  };
  return option(p_u, alloc.a_u, dec.r_u) + option(p_l, alloc.a_l, dec.r_l) + option(p_p, 1.0, params.transit_rate);
}

/// Argmin of the passenger cost over the barycentric grid with spacing
/// `resolution` (rounded so that 1/resolution is an integer).
inline PassengerSplit passenger_oracle(const DriverAllocation& alloc, const PlatformDecision& dec,
                                       const MarketParams& params, double resolution) {
  check_resolution(resolution);
  const long n = std::lround(1.0 / resolution);
  const double h = 1.0 / static_cast<double>(n);
  double best = std::numeric_limits<double>::infinity();
  PassengerSplit arg{0.0, 0.0, 1.0};
  for (long i = 0; i <= n; ++i) {
    for (long j = 0; i + j <= n; ++j) {
      const double p_u = static_cast<double>(i) * h;
      const double p_l = static_cast<double>(j) * h;
      const double p_p = static_cast<double>(n - i - j) * h;
      const double cost = direct_passenger_cost(p_u, p_l, p_p, alloc, dec, params);
      if (cost < best) {
        best = cost;
        arg = {p_u, p_l, p_p};
      }
    }
  }
  return arg;
}

struct DriverOracleResult {
  DriverAllocation alloc;
  double profit = -std::numeric_limits<double>::infinity();
  std::size_t feasible_points = 0;
};

/// Exhaustive driver search over [0,1]^2, keeping points that satisfy the
/// matching constraint at the induced passenger split. Ties prefer larger
/// a_u, then larger a_l.
inline DriverOracleResult driver_oracle_search(const PlatformDecision& dec, const MarketParams& params,
                                               double resolution) {
  check_resolution(resolution);
  const long n = std::lround(1.0 / resolution);
  const double h = 1.0 / static_cast<double>(n);
  const double tie_tol = 1e-12;
  DriverOracleResult res;
  for (long i = 0; i <= n; ++i) {
    for (long j = 0; j <= n; ++j) {
      const DriverAllocation alloc{static_cast<double>(i) * h, static_cast<double>(j) * h};
      const PassengerSplit split = passenger_best_response(alloc, dec, params);
      if (alloc.total() > split.p_u + split.p_l + kMatchingSlack) continue;
      ++res.feasible_points;
      const double profit = split.p_u * (dec.c_u - params.gas) + split.p_l * (dec.c_l - params.gas);
      const bool better = profit > res.profit + tie_tol;
      const bool tied = std::abs(profit - res.profit) <= tie_tol &&
                        (alloc.a_u > res.alloc.a_u || (alloc.a_u == res.alloc.a_u && alloc.a_l > res.alloc.a_l));
      if (better || tied) {
        res.profit = profit;
        res.alloc = alloc;
      }
    }
  }
  return res;
}

inline DriverAllocation driver_oracle(const PlatformDecision& dec, const MarketParams& params, double resolution) {
  return driver_oracle_search(dec, params, resolution).alloc;
}

/// Central second difference f(x+h) - 2 f(x) + f(x-h).
inline double second_difference(const std::function<double(double)>& f, double x, double h) {
  return f(x + h) - 2.0 * f(x) + f(x - h);
}

struct QuadraticCheck {
  bool is_quadratic = false;
  double curvature = 0.0;
  double spread = 0.0;  // max - min of the raw second differences
};

/// Second differences of allocation_value at 10 interior points of [0, A].
inline QuadraticCheck quadratic_check(const PlatformDecision& dec, const MarketParams& params, double total,
                                      double step) {
  if (!(step > 0.0) || !(step < total / 4.0)) throw DomainError("quadratic check needs 0 < step < A/4");
  const auto f = [&](double a_u) { return allocation_value(a_u, total, dec, params); };
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double sum = 0.0;
  constexpr int kPoints = 10;
  for (int k = 0; k < kPoints; ++k) {
    const double x = step + (total - 2.0 * step) * static_cast<double>(k) / (kPoints - 1);
    const double d2 = second_difference(f, x, step);
    lo = std::min(lo, d2);
    hi = std::max(hi, d2);
    sum += d2;
  }
  QuadraticCheck out;
  out.spread = hi - lo;
  out.is_quadratic = out.spread <= 1e-7;
  out.curvature = sum / kPoints / (step * step);
  return out;
}

/// Iterate A <- min(1, p_u(A) + p_l(A)) with availability split by `share_u`
/// (fraction of A on U) until the update stalls.
inline double participation_by_iteration(const PlatformDecision& dec, const MarketParams& params, double share_u,
                                         double start, int max_iterations = 100000) {
  double total = start;
  for (int it = 0; it < max_iterations; ++it) {
    const DriverAllocation alloc{share_u * total, (1.0 - share_u) * total};
    const double next = std::min(1.0, passenger_best_response(alloc, dec, params).platform_share());
    if (std::abs(next - total) <= 1e-15) return next;
    total = next;
  }
  return total;
}

}  // namespace rideshare::oracle
