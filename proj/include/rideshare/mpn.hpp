#pragma once

// Mathematical Program Networks: parameterized programs wired as a DAG, with
// mesh-based certification that a joint point lies in every node's solution
// graph.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rideshare::mpn {

using Vector = std::vector<double>;
/// Cost to minimize; maximizers are stored negated.
using Objective = std::function<double(std::span<const double>)>;
/// Constraint residuals, feasible when every entry is <= 0.
using Constraints = std::function<Vector(std::span<const double>)>;
/// Overwrites a node's endogenous variables (and its descendants') with its
/// rational response to the exogenous variables already in the vector.
using ResponseHook = std::function<void(std::span<double>)>;

struct MPNode {
  std::string label;
  std::vector<std::size_t> decision_indices;
  Objective objective;
  Constraints constraints;  // empty: unconstrained
  ResponseHook response;    // empty: node is never re-solved by a parent
  /// Perturbation directions in the full vector. Empty means the unit
  /// coordinates of decision_indices. Equality-constrained nodes supply
  /// directions tangent to their constraints.
  std::vector<Vector> directions;
};

class MPNetwork {
 public:
  MPNetwork(std::size_t dimension, std::vector<MPNode> nodes, std::vector<std::pair<std::size_t, std::size_t>> edges)
      : dimension_(dimension), nodes_(std::move(nodes)), edges_(std::move(edges)) {
    validate();
    order_ = topological_order();
  }

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return nodes_.size(); }
  const MPNode& node(std::size_t i) const { return nodes_.at(i); }
  const std::vector<MPNode>& nodes() const { return nodes_; }
  const std::vector<std::pair<std::size_t, std::size_t>>& edges() const { return edges_; }

  std::vector<std::size_t> children(std::size_t i) const {
    check_node(i);
    std::vector<std::size_t> out;
    for (const auto& [from, to] : edges_)
      if (from == i) out.push_back(to);
    // Re-solve children in topological order so shared descendants settle last.
    std::sort(out.begin(), out.end(), [&](std::size_t a, std::size_t b) { return rank(a) < rank(b); });
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  void check_node(std::size_t i) const {
    if (i >= nodes_.size()) throw std::out_of_range("node index " + std::to_string(i) + " out of range");
  }

 private:
  void validate() const {
    std::vector<int> owner(dimension_, -1);
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const MPNode& n = nodes_[i];
      if (n.decision_indices.empty()) throw std::invalid_argument("node '" + n.label + "' has no decision variables");
      if (!n.objective) throw std::invalid_argument("node '" + n.label + "' has no objective");
      for (std::size_t k : n.decision_indices) {
        if (k >= dimension_) throw std::invalid_argument("node '" + n.label + "' index out of range");
        if (owner[k] >= 0)
          throw std::invalid_argument("variable " + std::to_string(k) + " is endogenous to two nodes");
        owner[k] = static_cast<int>(i);
      }
      for (const Vector& d : n.directions)
        if (d.size() != dimension_) throw std::invalid_argument("node '" + n.label + "' direction has wrong length");
    }
    for (const auto& [from, to] : edges_) {
      if (from >= nodes_.size() || to >= nodes_.size()) throw std::invalid_argument("edge index out of range");
      if (from == to) throw std::invalid_argument("self-loop edge");
    }
  }

  std::vector<std::size_t> topological_order() const {
    std::vector<std::size_t> indegree(nodes_.size(), 0);
    for (const auto& e : edges_) ++indegree[e.second];
    std::vector<std::size_t> ready;
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      if (indegree[i] == 0) ready.push_back(i);
    std::vector<std::size_t> order;
    while (!ready.empty()) {
      const std::size_t i = ready.front();
      ready.erase(ready.begin());
      order.push_back(i);
      for (const auto& [from, to] : edges_)
        if (from == i && --indegree[to] == 0) ready.push_back(to);
    }
    if (order.size() != nodes_.size()) throw std::invalid_argument("network has a cycle");
    return order;
  }

  std::size_t rank(std::size_t node) const {
    return static_cast<std::size_t>(std::find(order_.begin(), order_.end(), node) - order_.begin());
  }

  std::size_t dimension_;
  std::vector<MPNode> nodes_;
  std::vector<std::pair<std::size_t, std::size_t>> edges_;
  std::vector<std::size_t> order_;
};

/// Endogenous indices of `node` and every node reachable from it, sorted.
inline std::vector<std::size_t> descendant_indices(const MPNetwork& network, std::size_t node) {
  network.check_node(node);
  std::vector<bool> seen(network.size(), false);
  std::vector<std::size_t> stack{node};
  std::vector<std::size_t> out;
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    if (seen[i]) continue;
    seen[i] = true;
    const auto& idx = network.node(i).decision_indices;
    out.insert(out.end(), idx.begin(), idx.end());
    for (std::size_t c : network.children(i)) stack.push_back(c);
  }
  std::sort(out.begin(), out.end());
  return out;
}

struct LocalCheck {
  double stationarity = 0.0;  // best objective decrease found by perturbation
  double feasibility = 0.0;   // max positive constraint violation
  bool children_consistent = true;
  double children_gap = 0.0;  // max deviation of descendants from the children's responses
};

namespace detail {

inline constexpr double kInfeasible = 1e300;

inline double max_violation(const MPNode& node, std::span<const double> x) {
  if (!node.constraints) return 0.0;
  double worst = 0.0;
  for (double r : node.constraints(x)) worst = std::max(worst, std::isnan(r) ? kInfeasible : r);
  return worst;
}

inline void apply_children(const MPNetwork& network, std::size_t node, std::span<double> x) {
  for (std::size_t c : network.children(node))
    if (const auto& hook = network.node(c).response) hook(x);
}

}  // namespace detail

/// Mesh-based local optimality of one node at `point`.
///
/// Each direction is tried at +-step, +-step/2, +-step/4 and +-step/8; after a
/// move the node's children are re-solved through their response hooks.
/// Moves that break the node's own constraints are skipped.
inline LocalCheck check_local_optimality(const MPNetwork& network, std::size_t node, std::span<const double> point,
                                         double tol, double step = 1e-4) {
  network.check_node(node);
  if (point.size() != network.dimension()) throw std::invalid_argument("point has wrong dimension");
  if (!(step > 0.0)) throw std::invalid_argument("step must be positive");

  const MPNode& n = network.node(node);
  const double base = n.objective(point);
  if (!std::isfinite(base)) throw std::domain_error("non-finite objective for node '" + n.label + "'");

  LocalCheck out;
  out.feasibility = detail::max_violation(n, point);

  Vector settled(point.begin(), point.end());
  detail::apply_children(network, node, settled);
  for (std::size_t i = 0; i < settled.size(); ++i) out.children_gap = std::max(out.children_gap, std::abs(settled[i] - point[i]));
  out.children_consistent = out.children_gap <= tol;

  std::vector<Vector> directions = n.directions;
  if (directions.empty()) {
    for (std::size_t k : n.decision_indices) {
      Vector d(network.dimension(), 0.0);
      d[k] = 1.0;
      directions.push_back(std::move(d));
    }
  }

  const double allowed = out.feasibility + 1e-12;
  Vector trial(point.size());
  for (const Vector& d : directions) {
    for (double sign : {1.0, -1.0}) {
      for (double scale : {1.0, 0.5, 0.25, 0.125}) {
        const double s = sign * scale * step;
        for (std::size_t i = 0; i < trial.size(); ++i) trial[i] = point[i] + s * d[i];
        detail::apply_children(network, node, trial);
        if (detail::max_violation(n, trial) > allowed) continue;
        const double value = n.objective(trial);
        if (std::isnan(value)) continue;
        out.stationarity = std::max(out.stationarity, base - value);
      }
    }
  }
  return out;
}

struct NodeReport {
  std::string label;
  LocalCheck check;
  bool passed = false;
};

struct EquilibriumReport {
  Vector point;
  std::vector<NodeReport> per_node;
  bool is_equilibrium = false;
  double tolerance = 0.0;

  /// First node that failed, if any.
  std::optional<std::size_t> first_failure() const {
    for (std::size_t i = 0; i < per_node.size(); ++i)
      if (!per_node[i].passed) return i;
    return std::nullopt;
  }
};

/// A point is an equilibrium when it lies in every node's solution graph.
inline EquilibriumReport is_equilibrium(const MPNetwork& network, std::span<const double> point, double tol,
                                        double step = 1e-4) {
  EquilibriumReport report;
  report.point.assign(point.begin(), point.end());
  report.tolerance = tol;
  report.is_equilibrium = true;
  for (std::size_t i = 0; i < network.size(); ++i) {
    NodeReport nr{network.node(i).label, check_local_optimality(network, i, point, tol, step), false};
    nr.passed = nr.check.stationarity <= tol && nr.check.feasibility <= tol && nr.check.children_consistent;
    report.is_equilibrium = report.is_equilibrium && nr.passed;
    report.per_node.push_back(std::move(nr));
  }
  return report;
}

}  // namespace rideshare::mpn
