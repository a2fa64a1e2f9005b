#pragma once

// The ridesharing game as an MPN: platforms U and L decide simultaneously,
// then drivers D, then passengers P (edges U->D, L->D, D->P).

#include <array>
#include <span>

#include "rideshare/model.hpp"
#include "rideshare/mpn.hpp"

namespace rideshare {

/// Layout of the joint decision vector.
enum Var : std::size_t { kRateU, kCommU, kRateL, kCommL, kAvailU, kAvailL, kShareU, kShareL, kShareP, kVarCount };

enum NodeId : std::size_t { kNodeU, kNodeL, kNodeD, kNodeP };

inline PlatformDecision decision_of(std::span<const double> x) {
  return {x[kRateU], x[kCommU], x[kRateL], x[kCommL]};
}

inline DriverAllocation allocation_of(std::span<const double> x) { return {x[kAvailU], x[kAvailL]}; }

inline PassengerSplit split_of(std::span<const double> x) { return {x[kShareU], x[kShareL], x[kShareP]}; }

inline mpn::Vector joint_point(const PlatformDecision& dec, const StageOutcome& out) {
  return {dec.r_u, dec.c_u, dec.r_l, dec.c_l, out.alloc.a_u, out.alloc.a_l,
          out.split.p_u, out.split.p_l, out.split.p_p};
}

/// Joint point of the full backward-induction outcome for `dec`.
inline mpn::Vector joint_point(const PlatformDecision& dec, const MarketParams& params) {
  return joint_point(dec, stage_outcome(dec, params));
}

namespace detail {

inline void write_split(std::span<double> x, const PassengerSplit& s) {
  x[kShareU] = s.p_u;
  x[kShareL] = s.p_l;
  x[kShareP] = s.p_p;
}

inline mpn::Vector unit(std::size_t k, double v = 1.0) {
  mpn::Vector d(kVarCount, 0.0);
  d[k] = v;
  return d;
}

inline mpn::MPNode platform_node(Platform p, DeviationSet moves) {
  const std::size_t rate = p == Platform::U ? kRateU : kRateL;
  const std::size_t comm = p == Platform::U ? kCommU : kCommL;
  const std::size_t share = p == Platform::U ? kShareU : kShareL;
  mpn::MPNode node;
  node.label = to_string(p);
  node.decision_indices = {rate, comm};
  node.objective = [=](std::span<const double> x) { return -x[share] * (x[rate] - x[comm]); };
  node.constraints = [=](std::span<const double> x) { return mpn::Vector{-x[rate], -x[comm]}; };
  if (moves != DeviationSet::CommissionsOnly) node.directions.push_back(unit(rate));
  if (moves != DeviationSet::RatesOnly) node.directions.push_back(unit(comm));
  return node;
}

}  // namespace detail

/// Build the four-node network for the given market.
inline mpn::MPNetwork make_rideshare_network(const MarketParams& params, DeviationSet moves = DeviationSet::Full) {
  params.validate();
  std::vector<mpn::MPNode> nodes;
  nodes.push_back(detail::platform_node(Platform::U, moves));
  nodes.push_back(detail::platform_node(Platform::L, moves));

  mpn::MPNode drivers;
  drivers.label = "D";
  drivers.decision_indices = {kAvailU, kAvailL};
  drivers.objective = [params](std::span<const double> x) {
    return -(x[kShareU] * (x[kCommU] - params.gas) + x[kShareL] * (x[kCommL] - params.gas));
  };
  drivers.constraints = [](std::span<const double> x) {
    return mpn::Vector{-x[kAvailU], x[kAvailU] - 1.0, -x[kAvailL], x[kAvailL] - 1.0,
                       x[kAvailU] + x[kAvailL] - x[kShareU] - x[kShareL]};
  };
  drivers.response = [params](std::span<double> x) {
    const PlatformDecision dec = decision_of(x);
    const DriverAllocation alloc = driver_best_response(dec, params);
    x[kAvailU] = alloc.a_u;
    x[kAvailL] = alloc.a_l;
    detail::write_split(x, passenger_best_response(alloc, dec, params));
  };
  nodes.push_back(std::move(drivers));

  mpn::MPNode passengers;
  passengers.label = "P";
  passengers.decision_indices = {kShareU, kShareL, kShareP};
  passengers.objective = [params](std::span<const double> x) {
    return passenger_cost(split_of(x), allocation_of(x), decision_of(x), params);
  };
  passengers.constraints = [](std::span<const double> x) {
    const double sum = x[kShareU] + x[kShareL] + x[kShareP];
    return mpn::Vector{-x[kShareU], x[kShareU] - 1.0, -x[kShareL], x[kShareL] - 1.0,
                       -x[kShareP], x[kShareP] - 1.0, sum - 1.0, 1.0 - sum};
  };
  passengers.response = [params](std::span<double> x) {
    detail::write_split(x, passenger_best_response(allocation_of(x), decision_of(x), params));
  };
  // Exchanges between pairs of options keep the shares on the simplex.
  for (auto [from, to] : std::array<std::pair<std::size_t, std::size_t>, 3>{
           {{kShareU, kShareL}, {kShareU, kShareP}, {kShareL, kShareP}}}) {
    mpn::Vector d(kVarCount, 0.0);
    d[from] = 1.0;
    d[to] = -1.0;
    passengers.directions.push_back(std::move(d));
  }
  nodes.push_back(std::move(passengers));

  return mpn::MPNetwork(kVarCount, std::move(nodes), {{kNodeU, kNodeD}, {kNodeL, kNodeD}, {kNodeD, kNodeP}});
}

}  // namespace rideshare
