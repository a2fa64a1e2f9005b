// Acceptance criteria 1-10. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails.

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rideshare/analysis.hpp"
#include "rideshare/model.hpp"
#include "rideshare/mpn.hpp"
#include "rideshare/network.hpp"
#include "rideshare/oracle.hpp"

using namespace rideshare;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

class Draw {
 public:
  explicit Draw(std::uint64_t seed) : rng_(seed) {}
  double operator()(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

 private:
  std::mt19937_64 rng_;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// 1. Passenger closed form against the simplex-grid oracle.
Verdict passenger_vs_oracle() {
  Draw draw(101);
  double worst_gap = 0.0;
  double worst_excess = 0.0;
  double worst_sum = 0.0;
  int bad = 0;
  for (int i = 0; i < 1000; ++i) {
    const MarketParams m{draw(0.1, 5.0), 0.0, draw(0.0, 4.0)};
    const double ub = rate_upper_bound(m);
    const PlatformDecision dec{draw(0.0, ub), 0.0, draw(0.0, ub), 0.0};
    const DriverAllocation alloc{draw(0.0, 1.0), draw(0.0, 1.0)};
    const PassengerSplit s = passenger_best_response(alloc, dec, m);
    const PassengerSplit o = oracle::passenger_oracle(alloc, dec, m, 0.01);
    const double gap = std::max({std::abs(s.p_u - o.p_u), std::abs(s.p_l - o.p_l), std::abs(s.p_p - o.p_p)});
    const double excess = oracle::direct_passenger_cost(s.p_u, s.p_l, s.p_p, alloc, dec, m) -
                          oracle::direct_passenger_cost(o.p_u, o.p_l, o.p_p, alloc, dec, m);
    const double sum = std::abs(s.p_u + s.p_l + s.p_p - 1.0);
    worst_gap = std::max(worst_gap, gap);
    worst_excess = std::max(worst_excess, excess);
    worst_sum = std::max(worst_sum, sum);
    if (gap > 0.02 || excess > 1e-10 || sum > 1e-12) ++bad;
  }
  return {bad == 0, "1000 cases, " + std::to_string(bad) + " failing; max component gap " +
                        fmt("%.3g", worst_gap) + ", max cost excess " + fmt("%.3g", worst_excess) +
                        ", max |sum-1| " + fmt("%.3g", worst_sum)};
}

// 2. Marginal costs equalized across positive-share options.
Verdict fonc_equalization() {
  Draw draw(202);
  int interior = 0;
  int bad = 0;
  double worst = 0.0;
  while (interior < 1000) {
    const MarketParams m{draw(0.1, 5.0), 0.0, draw(0.0, 4.0)};
    const double ub = rate_upper_bound(m);
    const PlatformDecision dec{draw(0.0, ub), 0.0, draw(0.0, ub), 0.0};
    const DriverAllocation alloc{draw(0.01, 1.0), draw(0.01, 1.0)};
    const PassengerSplit s = passenger_best_response(alloc, dec, m);
    if (!(s.p_u > 0.0 && s.p_l > 0.0 && s.p_p > 0.0)) continue;
    ++interior;
    const double mc_u = dec.r_u + 2.0 * m.lambda * s.p_u / alloc.a_u;
    const double mc_l = dec.r_l + 2.0 * m.lambda * s.p_l / alloc.a_l;
    const double mc_p = m.transit_rate + 2.0 * m.lambda * s.p_p;
    const double spread = std::max({mc_u, mc_l, mc_p}) - std::min({mc_u, mc_l, mc_p});
    worst = std::max(worst, spread);
    if (spread > 1e-8) ++bad;
  }
  return {bad == 0, "1000 interior cases, " + std::to_string(bad) + " failing; worst spread " + fmt("%.3g", worst)};
}

// 3. Second differences constant and equal to the closed-form Hessian.
Verdict quadraticity() {
  Draw draw(303);
  int bad = 0;
  double worst_spread = 0.0;
  double worst_curv = 0.0;
  for (int i = 0; i < 200; ++i) {
    const MarketParams m{draw(0.1, 5.0), draw(0.0, 1.0), draw(1.0, 4.0)};
    const double ub = rate_upper_bound(m);
    const PlatformDecision dec{draw(0.0, ub), draw(0.0, 2.0), draw(0.0, ub), draw(0.0, 2.0)};
    const double total = draw(0.1, 1.0);
    const auto q = oracle::quadratic_check(dec, m, total, 1e-3);
    const double curv_err = std::abs(q.curvature - allocation_hessian(dec, m, total));
    worst_spread = std::max(worst_spread, q.spread);
    worst_curv = std::max(worst_curv, curv_err);
    if (!q.is_quadratic || curv_err > 1e-6) ++bad;
  }
  return {bad == 0, "200 decisions, " + std::to_string(bad) + " failing; worst second-difference spread " +
                        fmt("%.3g", worst_spread) + ", worst curvature error " + fmt("%.3g", worst_curv)};
}

// 4. No interior allocation beats the better endpoint, evaluated through the
// passenger response rather than the closed-form driver payoff.
Verdict theorem1() {
  Draw draw(404);
  int bad = 0;
  int realized_bad = 0;
  double worst = -INFINITY;
  for (int i = 0; i < 1000; ++i) {
    const MarketParams m{draw(0.1, 5.0), draw(0.0, 1.0), draw(1.0, 4.0)};
    const double ub = rate_upper_bound(m);
    const PlatformDecision dec{draw(0.0, ub), draw(m.gas, m.gas + 1.0), draw(0.0, ub), draw(m.gas, m.gas + 1.0)};
    const double total = draw(0.01, 1.0);
    auto value = [&](double a_u) { return allocation_value(a_u, total, dec, m); };
    auto realized = [&](double a_u) {
      const PassengerSplit s = passenger_best_response({a_u, total - a_u}, dec, m);
      return s.p_u * (dec.c_u - m.gas) + s.p_l * (dec.c_l - m.gas);
    };
    const double ends = std::max(value(0.0), value(total));
    const double realized_ends = std::max(realized(0.0), realized(total));
    double interior = -INFINITY;
    double realized_interior = -INFINITY;
    for (int k = 1; k < 100; ++k) {
      interior = std::max(interior, value(total * k / 100.0));
      realized_interior = std::max(realized_interior, realized(total * k / 100.0));
    }
    worst = std::max(worst, interior - ends);
    if (interior > ends + 1e-9) ++bad;
    if (realized_interior > realized_ends + 1e-9) ++realized_bad;
  }
  return {bad == 0, "1000 decisions, " + std::to_string(bad) + " with strict mixed dominance; max interior-endpoint " +
                        fmt("%.3g", worst) + "; realized payoff with passenger faces: " +
                        std::to_string(realized_bad) + " exceed"};
}

// 5. Collusion verdicts coincide with a flat driver payoff.
Verdict constant_response_grid() {
  const MarketParams m{1.0, 1.0, 3.0};
  const double ub = rate_upper_bound(m);
  std::array<double, 10> rates{};
  std::array<double, 10> comms{};
  for (int k = 0; k < 10; ++k) {
    rates[k] = ub * k / 10.0;
    comms[k] = m.gas + 0.1 * k;
  }
  auto spread = [&](const PlatformDecision& dec) {
    double lo = INFINITY;
    double hi = -INFINITY;
    for (int k = 0; k <= 100; ++k) {
      const double v = allocation_value(k / 100.0, 1.0, dec, m);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    return hi - lo;
  };
  int points = 0;
  int mismatched = 0;
  int unseparated = 0;
  int colluding = 0;
  for (double r_u : rates)
    for (double c_u : comms)
      for (double r_l : rates)
        for (double c_l : comms) {
          const PlatformDecision dec{r_u, c_u, r_l, c_l};
          const CollusionTag tag = classify_collusion(dec, m, 1e-9).tag;
          const double s = spread(dec);
          const bool collude = tag == CollusionTag::DoubleSided || tag == CollusionTag::SingleSidedWage;
          ++points;
          colluding += collude;
          if (collude != (s <= 1e-8)) ++mismatched;
          if (tag == CollusionTag::Competition && std::abs(balance_residual(dec, m)) > 1e-6 && !(s > 1e-6))
            ++unseparated;
        }
  return {mismatched == 0 && unseparated == 0,
          std::to_string(points) + " grid points, " + std::to_string(colluding) + " colluding; " +
              std::to_string(mismatched) + " verdict/flatness mismatches, " + std::to_string(unseparated) +
              " unbalanced competition points with spread <= 1e-6"};
}

// 6. Participation fixed points, closed form against the passenger map and
// against iteration of that map.
Verdict participation() {
  Draw draw(606);
  int checked = 0;
  int iterated = 0;
  int face_active = 0;
  int bad = 0;
  double worst = 0.0;
  auto map = [](const PlatformDecision& dec, const MarketParams& m, double share_u, double a) {
    return passenger_best_response({share_u * a, (1.0 - share_u) * a}, dec, m).platform_share();
  };
  for (int i = 0; i < 300; ++i) {
    const MarketParams m{draw(0.1, 5.0), 0.0, draw(0.0, 4.0)};
    const double ub = rate_upper_bound(m);
    const PlatformDecision dec{draw(0.0, ub), 0.0, draw(0.0, ub), 0.0};
    struct Case {
      double share_u;
      double closed;
    };
    const std::array<Case, 3> cases{
        Case{1.0, std::clamp((m.transit_rate - dec.r_u) / (2.0 * m.lambda), 0.0, 1.0)},
        Case{0.0, std::clamp((m.transit_rate - dec.r_l) / (2.0 * m.lambda), 0.0, 1.0)},
        Case{0.5, std::clamp((2.0 * m.transit_rate - dec.r_u - dec.r_l) / (4.0 * m.lambda), 0.0, 1.0)}};
    for (const Case& c : cases) {
      const double a = c.closed;
      if (c.share_u == 0.5 && a > 0.0) {
        const PassengerSplit s = passenger_best_response({a / 2.0, a / 2.0}, dec, m);
        if (s.p_u == 0.0 || s.p_l == 0.0) {
          ++face_active;  // one platform priced out: the equal-split closed form does not apply
          continue;
        }
      }
      ++checked;
      double err = 0.0;
      if (a == 0.0)
        err = std::max(0.0, map(dec, m, c.share_u, 1e-6) - 1e-6);
      else if (a == 1.0)
        err = std::max(0.0, 1.0 - map(dec, m, c.share_u, 1.0));
      else
        err = std::abs(map(dec, m, c.share_u, a) - a);
      if (a >= 0.05) {
        ++iterated;
        for (int k = 1; k <= 10; ++k)
          err = std::max(err, std::abs(oracle::participation_by_iteration(dec, m, c.share_u, k / 10.0) - a));
      }
      worst = std::max(worst, err);
      if (err > 1e-9) ++bad;
    }
  }
  return {bad == 0, std::to_string(checked) + " fixed points (" + std::to_string(iterated) +
                        " iterated from 10 starts, " + std::to_string(face_active) +
                        " equal-split cases with a platform priced out skipped), " + std::to_string(bad) +
                        " failing; worst error " + fmt("%.3g", worst)};
}

// 7. Commission deviation from double collusion.
Verdict grim_trigger() {
  const MarketParams m{1.0, 1.0, 3.0};
  const PlatformDecision dec{2.0, 1.2, 2.0, 1.2};
  const DeviationReport rep = deviation_gain(dec, m, Platform::U, 0.0, 0.01);
  const NashCertificate cert = certify_epsilon_nash(dec, m, NashGrid::defaults(m), 0.01);
  const bool ok = std::abs(rep.deviated_profit - 0.395) <= 1e-3 && std::abs(rep.baseline_profit - 0.2) <= 1e-9 &&
                  !cert.certified;
  return {ok, "deviator profit " + fmt("%.12g", rep.deviated_profit) + ", baseline " +
                  fmt("%.12g", rep.baseline_profit) + ", certificate at eps 0.01 " +
                  (cert.certified ? "granted" : "refused") + " (max gain " +
                  fmt("%.6g", std::max(cert.max_gain_u, cert.max_gain_l)) + ")"};
}

// 8. Exact zeros outside the pricing bounds.
Verdict pricing_bounds() {
  int bad = 0;
  int cases = 0;
  for (const MarketParams m : {MarketParams{1.0, 0.0, 2.0}, MarketParams{0.3, 0.0, 5.0}, MarketParams{2.0, 0.0, 6.0}}) {
    const double high = rate_upper_bound(m) + 0.01;
    for (double a_u : {0.05, 0.4, 1.0})
      for (double a_l : {0.0, 0.3, 1.0}) {
        ++cases;
        const PassengerSplit s = passenger_best_response({a_u, a_l}, {high, 0.0, 1.0, 0.0}, m);
        if (s.p_u != 0.0) ++bad;
      }
    for (double a_u : {0.3, 0.5, 0.7})
      for (double a_l : {0.3, 0.5}) {
        const double total = a_u + a_l;
        const double low = m.transit_rate - 2.0 * m.lambda / total - 0.01;
        ++cases;
        const PassengerSplit s = passenger_best_response({a_u, a_l}, {low, 0.0, low, 0.0}, m);
        if (s.p_p != 0.0) ++bad;
      }
  }
  return {bad == 0, std::to_string(cases) + " cases, " + std::to_string(bad) + " without an exact zero share"};
}

// 9. Network certification of the wage-collusion rate equilibrium.
Verdict mpn_certification() {
  const MarketParams m{1.0, 1.0, 3.0};
  const PlatformDecision eq = find_rate_equilibrium_under_wage_collusion(m, default_rate_grid(m));
  const auto net = make_rideshare_network(m, DeviationSet::RatesOnly);
  const auto x = joint_point(eq, m);
  const auto rep = mpn::is_equilibrium(net, x, 1e-6);
  int accepted = 0;
  for (std::size_t k = 0; k < x.size(); ++k)
    for (double d : {0.05, -0.05}) {
      auto y = x;
      y[k] += d;
      accepted += mpn::is_equilibrium(net, y, 1e-6).is_equilibrium;
    }
  return {rep.is_equilibrium && accepted == 0,
          "r* = " + fmt("%.4g", eq.r_u) + ", point " + (rep.is_equilibrium ? "accepted" : "rejected") + ", " +
              std::to_string(accepted) + " of 18 perturbed points accepted"};
}

// 10. Sweep CSV determinism through the command-line tool.
Verdict sweep_determinism() {
  const std::string scenario = std::string(RIDESHARE_SCENARIOS) + "/sweep_11x11.scn";
  const std::string a = std::string(RIDESHARE_SCRATCH) + "/acceptance_sweep_a.csv";
  const std::string b = std::string(RIDESHARE_SCRATCH) + "/acceptance_sweep_b.csv";
  auto run = [&](const std::string& out) {
    const int status = std::system((std::string(RIDESHARE_CLI) + " sweep-csv --scenario " + scenario + " --out " + out).c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  };
  auto slurp = [](const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
  };
  const int ca = run(a);
  const int cb = run(b);
  const std::string ta = slurp(a);
  const std::string tb = slurp(b);
  const auto lines = std::count(ta.begin(), ta.end(), '\n');
  const bool ok = ca == 0 && cb == 0 && !ta.empty() && ta == tb && lines == 122;
  return {ok, std::to_string(lines) + " lines, " + std::to_string(ta.size()) + " bytes, runs " +
                  (ta == tb ? "identical" : "differ")};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"passenger closed form vs oracle", passenger_vs_oracle},
      {"marginal-cost equalization", fonc_equalization},
      {"quadraticity and Hessian", quadraticity},
      {"no strict mixed dominance", theorem1},
      {"constant response vs collusion verdicts", constant_response_grid},
      {"participation fixed points", participation},
      {"grim-trigger deviation", grim_trigger},
      {"degenerate pricing bounds", pricing_bounds},
      {"network certification", mpn_certification},
      {"sweep CSV determinism", sweep_determinism},
  };
  int failed = 0;
  int index = 0;
  for (const auto& [name, check] : criteria) {
    ++index;
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    failed += !v.pass;
    std::printf("%s %2d %s: %s\n", v.pass ? "PASS" : "FAIL", index, name, v.detail.c_str());
  }
  std::fflush(stdout);
  return failed == 0 ? 0 : 1;
}
