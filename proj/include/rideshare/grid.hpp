#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace rideshare {

/// Uniform axis `low, low + step, ...` up to `high` (inclusive, within rounding).
struct GridAxis {
  double low = 0.0;
  double high = 0.0;
  double step = 1.0;

  /// Axis with `points` evenly spaced values covering [low, high].
  static GridAxis with_points(double low, double high, std::size_t points) {
    if (points < 2) throw std::invalid_argument("grid axis needs at least 2 points");
    GridAxis axis{low, high, (high - low) / static_cast<double>(points - 1)};
    if (axis.step <= 0.0) axis.step = 1.0;  // degenerate range collapses to one value
    return axis;
  }

  std::size_t size() const {
    if (!(step > 0.0) || high < low) return 0;
    return static_cast<std::size_t>(std::floor((high - low) / step + 1e-9)) + 1;
  }

  double at(std::size_t i) const {
    const double v = low + static_cast<double>(i) * step;
    return v > high ? high : v;
  }

  void validate(const std::string& name) const {
    if (!std::isfinite(low) || !std::isfinite(high) || !std::isfinite(step))
      throw std::invalid_argument(name + ": non-finite grid bound");
    if (low > high) throw std::invalid_argument(name + ": low exceeds high");
    if (!(step > 0.0)) throw std::invalid_argument(name + ": step must be positive");
    if (size() < 2) throw std::invalid_argument(name + ": grid needs at least 2 points");
  }
};

}  // namespace rideshare
