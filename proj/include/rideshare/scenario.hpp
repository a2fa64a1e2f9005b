#pragma once

// Scenario files: line-oriented `key = value` text with dotted section
// prefixes. `#` starts a comment. Recognized keys:
//
//   market.lambda, market.gas, market.transit_rate          (required)
//   decision.r_u, decision.c_u, decision.r_l, decision.c_l  (number)
//   sweep.r_u ... sweep.c_l                                 (low high step)
//   tolerances.tol, tolerances.epsilon, tolerances.resolution
//   seed                                                    (integer)
//   verify.cases                                            (integer)
//   nash.rate, nash.commission                              (low high step)
//   nash.moves                                              (full | rates | commissions)
//   nash.cap_commission                                     (true | false)
//   rate_equilibrium.grid                                   (low high step)
//   rate_equilibrium.max_iterations                         (integer)

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rideshare/analysis.hpp"
#include "rideshare/grid.hpp"
#include "rideshare/model.hpp"

namespace rideshare {

/// Malformed scenario text (bad syntax, unknown key, missing field).
class ScenarioParseError : public std::runtime_error {
 public:
  ScenarioParseError(std::size_t line, std::string field, const std::string& message)
      : std::runtime_error(describe(line, field, message)), line_(line), field_(std::move(field)) {}

  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  static std::string describe(std::size_t line, const std::string& field, const std::string& message) {
    std::string out = line > 0 ? "line " + std::to_string(line) + ": " : std::string();
    if (!field.empty()) out += "field '" + field + "': ";
    return out + message;
  }

  std::size_t line_;
  std::string field_;
};

/// Well-formed scenario whose values fall outside the model's domain.
class ScenarioValidationError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Decision variables in sweep order (first varies slowest).
inline constexpr std::array<const char*, 4> kDecisionVars{"r_u", "c_u", "r_l", "c_l"};

struct Tolerances {
  double tol = 1e-9;
  double epsilon = 1e-6;
  double resolution = 0.01;
};

struct ScenarioFile {
  MarketParams market;
  std::array<std::optional<double>, 4> decision;
  std::array<std::optional<GridAxis>, 4> sweep;
  Tolerances tolerances;
  std::optional<std::uint64_t> seed;
  std::size_t verify_cases = 1000;
  std::optional<GridAxis> nash_rate;
  std::optional<GridAxis> nash_commission;
  DeviationSet nash_moves = DeviationSet::Full;
  bool nash_cap_commission = false;
  std::optional<GridAxis> rate_grid;
  std::size_t rate_max_iterations = 200;

  bool has_decision() const {
    for (std::size_t i = 0; i < 4; ++i)
      if (!decision[i] && !sweep[i]) return false;
    return true;
  }

  bool has_sweep() const {
    for (const auto& s : sweep)
      if (s) return true;
    return false;
  }

  /// Single decision; every variable must be fixed.
  PlatformDecision fixed_decision() const {
    for (std::size_t i = 0; i < 4; ++i)
      if (!decision[i])
        throw ScenarioParseError(0, std::string("decision.") + kDecisionVars[i], "missing decision value");
    return {*decision[0], *decision[1], *decision[2], *decision[3]};
  }

  NashGrid nash_grid() const {
    NashGrid grid = NashGrid::defaults(market);
    if (nash_rate) grid.rate = *nash_rate;
    if (nash_commission) grid.commission = *nash_commission;
    grid.moves = nash_moves;
    grid.cap_commission_at_rate = nash_cap_commission;
    return grid;
  }
};

/// Cross product of fixed values and sweep axes, lexicographic in
/// (r_u, c_u, r_l, c_l) with the last variable varying fastest.
inline std::vector<PlatformDecision> expand_decisions(const ScenarioFile& s) {
  std::array<std::vector<double>, 4> values;
  for (std::size_t i = 0; i < 4; ++i) {
    if (s.sweep[i]) {
      for (std::size_t k = 0; k < s.sweep[i]->size(); ++k) values[i].push_back(s.sweep[i]->at(k));
    } else if (s.decision[i]) {
      values[i].push_back(*s.decision[i]);
    } else {
      throw ScenarioParseError(0, std::string("decision.") + kDecisionVars[i], "missing decision value");
    }
  }
  std::vector<PlatformDecision> out;
  for (double r_u : values[0])
    for (double c_u : values[1])
      for (double r_l : values[2])
        for (double c_l : values[3]) out.push_back({r_u, c_u, r_l, c_l});
  return out;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split_words(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

inline double parse_number(std::string_view text, std::size_t line, const std::string& key) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end)
    throw ScenarioParseError(line, key, "expected a number, got '" + std::string(text) + "'");
  return v;
}

inline std::uint64_t parse_integer(std::string_view text, std::size_t line, const std::string& key) {
  std::uint64_t v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end)
    throw ScenarioParseError(line, key, "expected a non-negative integer, got '" + std::string(text) + "'");
  return v;
}

inline GridAxis parse_axis(std::string_view text, std::size_t line, const std::string& key) {
  const auto words = split_words(text);
  if (words.size() != 3) throw ScenarioParseError(line, key, "expected 'low high step'");
  return {parse_number(words[0], line, key), parse_number(words[1], line, key), parse_number(words[2], line, key)};
}

inline void require_nonnegative(double v, const std::string& key) {
  if (!std::isfinite(v) || v < 0.0) throw ScenarioValidationError(key + " must be finite and non-negative");
}

}  // namespace detail

/// Parse scenario text. Syntax problems raise ScenarioParseError; values
/// outside the model's domain raise ScenarioValidationError.
inline ScenarioFile parse_scenario(std::istream& in) {
  ScenarioFile s;
  std::array<bool, 3> market_seen{false, false, false};
  std::vector<std::string> seen_keys;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ScenarioParseError(line_no, "", "expected 'key = value'");
    const std::string key(detail::trim(line.substr(0, eq)));
    const std::string_view value = detail::trim(line.substr(eq + 1));
    if (key.empty()) throw ScenarioParseError(line_no, "", "empty key");
    if (value.empty()) throw ScenarioParseError(line_no, key, "empty value");
    for (const auto& k : seen_keys)
      if (k == key) throw ScenarioParseError(line_no, key, "duplicate key");
    seen_keys.push_back(key);

    auto number = [&] { return detail::parse_number(value, line_no, key); };
    bool handled = true;
    if (key == "market.lambda") {
      s.market.lambda = number();
      market_seen[0] = true;
    } else if (key == "market.gas") {
      s.market.gas = number();
      market_seen[1] = true;
    } else if (key == "market.transit_rate") {
      s.market.transit_rate = number();
      market_seen[2] = true;
    } else if (key == "tolerances.tol") {
      s.tolerances.tol = number();
    } else if (key == "tolerances.epsilon") {
      s.tolerances.epsilon = number();
    } else if (key == "tolerances.resolution") {
      s.tolerances.resolution = number();
    } else if (key == "seed") {
      s.seed = detail::parse_integer(value, line_no, key);
    } else if (key == "verify.cases") {
      s.verify_cases = detail::parse_integer(value, line_no, key);
    } else if (key == "nash.rate") {
      s.nash_rate = detail::parse_axis(value, line_no, key);
    } else if (key == "nash.commission") {
      s.nash_commission = detail::parse_axis(value, line_no, key);
    } else if (key == "nash.moves") {
      if (value == "full")
        s.nash_moves = DeviationSet::Full;
      else if (value == "rates")
        s.nash_moves = DeviationSet::RatesOnly;
      else if (value == "commissions")
        s.nash_moves = DeviationSet::CommissionsOnly;
      else
        throw ScenarioParseError(line_no, key, "expected full, rates or commissions");
    } else if (key == "nash.cap_commission") {
      if (value == "true")
        s.nash_cap_commission = true;
      else if (value == "false")
        s.nash_cap_commission = false;
      else
        throw ScenarioParseError(line_no, key, "expected true or false");
    } else if (key == "rate_equilibrium.grid") {
      s.rate_grid = detail::parse_axis(value, line_no, key);
    } else if (key == "rate_equilibrium.max_iterations") {
      s.rate_max_iterations = detail::parse_integer(value, line_no, key);
    } else {
      handled = false;
    }
    if (handled) continue;

    for (std::size_t i = 0; i < 4 && !handled; ++i) {
      const std::string var = kDecisionVars[i];
      if (key == "decision." + var) {
        if (s.sweep[i]) throw ScenarioParseError(line_no, key, "variable is already swept");
        s.decision[i] = number();
        handled = true;
      } else if (key == "sweep." + var) {
        if (s.decision[i]) throw ScenarioParseError(line_no, key, "variable already has a decision value");
        s.sweep[i] = detail::parse_axis(value, line_no, key);
        handled = true;
      }
    }
    if (!handled) throw ScenarioParseError(line_no, key, "unknown key");
  }

  static constexpr std::array<const char*, 3> kMarketKeys{"market.lambda", "market.gas", "market.transit_rate"};
  for (std::size_t i = 0; i < 3; ++i)
    if (!market_seen[i]) throw ScenarioParseError(0, kMarketKeys[i], "missing required field");

  // Domain validation.
  detail::require_nonnegative(s.market.lambda, "market.lambda");
  detail::require_nonnegative(s.market.gas, "market.gas");
  detail::require_nonnegative(s.market.transit_rate, "market.transit_rate");
  try {
    s.market.validate();
  } catch (const DomainError& e) {
    throw ScenarioValidationError(std::string("market: ") + e.what());
  }
  for (std::size_t i = 0; i < 4; ++i) {
    const std::string var = kDecisionVars[i];
    if (s.decision[i]) detail::require_nonnegative(*s.decision[i], "decision." + var);
    if (s.sweep[i]) {
      detail::require_nonnegative(s.sweep[i]->low, "sweep." + var);
      try {
        s.sweep[i]->validate("sweep." + var);
      } catch (const std::invalid_argument& e) {
        throw ScenarioValidationError(e.what());
      }
    }
  }
  detail::require_nonnegative(s.tolerances.tol, "tolerances.tol");
  if (!(s.tolerances.epsilon > 0.0) || !std::isfinite(s.tolerances.epsilon))
    throw ScenarioValidationError("tolerances.epsilon must be positive");
  if (!(s.tolerances.resolution > 0.0) || s.tolerances.resolution > 0.1)
    throw ScenarioValidationError("tolerances.resolution must lie in (0, 0.1]");
  for (const auto* axis : {&s.nash_rate, &s.nash_commission, &s.rate_grid}) {
    if (!*axis) continue;
    detail::require_nonnegative((*axis)->low, "grid low");
    try {
      (*axis)->validate("grid");
    } catch (const std::invalid_argument& e) {
      throw ScenarioValidationError(e.what());
    }
  }
  return s;
}

inline ScenarioFile parse_scenario(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_scenario(in);
}

/// Raised when a scenario or output file cannot be opened.
class FileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline ScenarioFile load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileError("cannot open scenario file '" + path + "'");
  return parse_scenario(in);
}

}  // namespace rideshare
