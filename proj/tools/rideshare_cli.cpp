// rideshare: scenario files in, stage solutions and equilibrium analyses out.
//
// Exit codes: 0 success, 1 verification or certification failed,
// 2 usage or scenario parse error, 3 domain validation, 4 I/O.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rideshare/analysis.hpp"
#include "rideshare/model.hpp"
#include "rideshare/mpn.hpp"
#include "rideshare/network.hpp"
#include "rideshare/records.hpp"
#include "rideshare/scenario.hpp"
#include "rideshare/suites.hpp"

namespace {

using namespace rideshare;
using nlohmann::json;

enum Exit { kOk = 0, kFailed = 1, kUsage = 2, kDomain = 3, kIo = 4 };

struct Options {
  std::string scenario;
  std::string out;
  std::string suite = "all";
  std::string format = "text";
  std::string deviator;
  double delta_r = 0.0;
  double delta_c = 0.0;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::optional<double> epsilon;
  std::optional<double> resolution;
};

ScenarioFile load(const Options& o) {
  ScenarioFile s = load_scenario(o.scenario);
  if (o.seed) s.seed = *o.seed;
  if (o.tol) s.tolerances.tol = *o.tol;
  if (o.epsilon) s.tolerances.epsilon = *o.epsilon;
  if (o.resolution) s.tolerances.resolution = *o.resolution;
  if (!(s.tolerances.tol > 0.0)) throw DomainError("tol must be positive");
  if (!(s.tolerances.epsilon > 0.0)) throw DomainError("epsilon must be positive");
  oracle::check_resolution(s.tolerances.resolution);
  return s;
}

bool as_json(const Options& o) { return o.format == "json"; }

void emit(const Options& o, const ResultRecord& rec) {
  if (as_json(o))
    std::cout << to_json_line(rec) << '\n';
  else
    std::cout << to_text(rec) << '\n';
}

int cmd_solve(const Options& o) {
  const ScenarioFile s = load(o);
  if (!s.has_decision()) (void)s.fixed_decision();
  std::vector<ResultRecord> records;
  for (const auto& dec : expand_decisions(s)) records.push_back(make_record(dec, s.market, s.tolerances.tol));
  for (const auto& r : records) emit(o, r);
  return kOk;
}

int cmd_classify(const Options& o) {
  const ScenarioFile s = load(o);
  if (!s.has_decision()) (void)s.fixed_decision();
  for (const auto& dec : expand_decisions(s)) {
    const ResultRecord rec = make_record(dec, s.market, s.tolerances.tol);
    const CollusionResiduals res = classify_collusion(dec, s.market, s.tolerances.tol).residuals;
    if (as_json(o)) {
      json j = to_json(rec);
      j["residuals"] = {{"rate_gap", round15(res.rate_gap)},     {"commission_gap", round15(res.commission_gap)},
                        {"margin_u", round15(res.margin_u)},     {"margin_l", round15(res.margin_l)},
                        {"headroom_u", round15(res.headroom_u)}, {"headroom_l", round15(res.headroom_l)}};
      std::cout << j.dump() << '\n';
    } else {
      std::cout << to_text(rec);
      std::cout << "  residuals     rate_gap=" << format_number(res.rate_gap)
                << " commission_gap=" << format_number(res.commission_gap)
                << " margin_u=" << format_number(res.margin_u) << " margin_l=" << format_number(res.margin_l)
                << " headroom_u=" << format_number(res.headroom_u)
                << " headroom_l=" << format_number(res.headroom_l) << "\n\n";
    }
  }
  return kOk;
}

int cmd_deviate(const Options& o) {
  const ScenarioFile s = load(o);
  const PlatformDecision dec = s.fixed_decision();
  const Platform who = o.deviator == "U" || o.deviator == "u" ? Platform::U : Platform::L;
  const DeviationReport rep = deviation_gain(dec, s.market, who, o.delta_r, o.delta_c);
  const ResultRecord before = make_record(rep.baseline_decision, s.market, s.tolerances.tol);
  const ResultRecord after = make_record(rep.deviated_decision, s.market, s.tolerances.tol);
  if (as_json(o)) {
    json j;
    j["deviator"] = to_string(who);
    j["delta_r"] = round15(rep.delta_r);
    j["delta_c"] = round15(rep.delta_c);
    j["baseline_profit"] = round15(rep.baseline_profit);
    j["deviated_profit"] = round15(rep.deviated_profit);
    j["gain"] = round15(rep.gain);
    j["tie"] = rep.tie;
    j["before"] = to_json(before);
    j["after"] = to_json(after);
    std::cout << j.dump() << '\n';
  } else {
    std::cout << "before\n" << to_text(before) << "after\n" << to_text(after);
    std::cout << "deviator " << to_string(who) << ": profit " << format_number(rep.baseline_profit) << " -> "
              << format_number(rep.deviated_profit) << ", gain " << format_number(rep.gain)
              << (rep.tie ? " (drivers indifferent)" : "") << '\n';
  }
  return kOk;
}

int cmd_sweep_csv(const Options& o) {
  const ScenarioFile s = load(o);
  if (!s.has_sweep()) throw ScenarioParseError(0, "sweep", "sweep-csv needs at least one sweep axis");
  if (!s.has_decision()) (void)s.fixed_decision();
  std::string text = std::string(kCsvHeader) + '\n';
  for (const auto& dec : expand_decisions(s)) text += to_csv_row(make_record(dec, s.market, s.tolerances.tol)) + '\n';
  std::ofstream out(o.out, std::ios::binary | std::ios::trunc);
  if (!out) throw FileError("cannot open output file '" + o.out + "'");
  out << text;
  out.flush();
  if (!out) throw FileError("failed writing output file '" + o.out + "'");
  return kOk;
}

int cmd_nash_certify(const Options& o) {
  const ScenarioFile s = load(o);
  const PlatformDecision dec = s.fixed_decision();
  const NashCertificate cert = certify_epsilon_nash(dec, s.market, s.nash_grid(), s.tolerances.epsilon);
  ResultRecord rec = make_record(dec, s.market, s.tolerances.tol);
  attach_certificate(rec, cert);
  if (as_json(o)) {
    json j = to_json(rec);
    j["certificate"]["supply_gain_u"] = round15(cert.supply_gain_u);
    j["certificate"]["supply_gain_l"] = round15(cert.supply_gain_l);
    j["certificate"]["deviations_checked"] = cert.deviations_checked;
    std::cout << j.dump() << '\n';
  } else {
    std::cout << to_text(rec);
    std::cout << "  best dev U    r=" << format_number(cert.best_deviation_u.r_u)
              << " c=" << format_number(cert.best_deviation_u.c_u) << '\n';
    std::cout << "  best dev L    r=" << format_number(cert.best_deviation_l.r_l)
              << " c=" << format_number(cert.best_deviation_l.c_l) << '\n';
    std::cout << "  supply gains  U=" << format_number(cert.supply_gain_u)
              << " L=" << format_number(cert.supply_gain_l) << '\n';
    std::cout << "  checked       " << cert.deviations_checked << " deviations\n";
  }
  return cert.certified ? kOk : kFailed;
}

int cmd_rate_equilibrium(const Options& o) {
  const ScenarioFile s = load(o);
  const GridAxis grid = s.rate_grid.value_or(default_rate_grid(s.market));
  PlatformDecision eq;
  try {
    eq = find_rate_equilibrium_under_wage_collusion(s.market, grid, s.rate_max_iterations);
  } catch (const CycleError& e) {
    std::cerr << "error: " << e.what() << "; states:";
    for (const auto& [r_u, r_l] : e.cycle()) std::cerr << " (" << format_number(r_u) << ", " << format_number(r_l) << ")";
    std::cerr << '\n';
    return kDomain;
  }
  const ResultRecord rec = make_record(eq, s.market, s.tolerances.tol);
  const auto net = make_rideshare_network(s.market, DeviationSet::RatesOnly);
  const auto report = mpn::is_equilibrium(net, joint_point(eq, s.market), s.tolerances.epsilon);
  if (as_json(o)) {
    json j = to_json(rec);
    j["mpn_equilibrium"] = report.is_equilibrium;
    std::cout << j.dump() << '\n';
  } else {
    std::cout << to_text(rec);
    std::cout << "  network       " << (report.is_equilibrium ? "local equilibrium" : "not a local equilibrium")
              << " at tol " << format_number(s.tolerances.epsilon) << '\n';
  }
  return kOk;
}

int cmd_verify(const Options& o) {
  if (!suites::is_suite_name(o.suite)) {
    std::cerr << "error: unknown suite '" << o.suite << "'\n";
    return kUsage;
  }
  const ScenarioFile s = load(o);
  suites::SuiteConfig cfg;
  cfg.seed = s.seed.value_or(1);
  cfg.cases = s.verify_cases;
  cfg.tol = s.tolerances.tol;
  cfg.resolution = s.tolerances.resolution;
  cfg.market = s.market;
  if (s.has_decision() && !s.has_sweep()) cfg.decision = s.fixed_decision();
  const auto results = suites::run_suite(o.suite, cfg);
  bool all = true;
  for (const auto& r : results) {
    all = all && r.passed();
    if (as_json(o)) {
      json j;
      j["suite"] = r.suite;
      j["passed"] = r.passed();
      j["checks"] = json::array();
      for (const auto& c : r.checks)
        j["checks"].push_back({{"name", c.name},
                               {"cases", c.cases},
                               {"passed", c.passed},
                               {"worst", round15(c.worst)},
                               {"threshold", round15(c.threshold)}});
      j["notes"] = r.notes;
      std::cout << j.dump() << '\n';
    } else {
      std::cout << r.suite << ": " << (r.passed() ? "PASS" : "FAIL") << '\n';
      for (const auto& c : r.checks)
        std::cout << "  " << (c.ok() ? "ok  " : "FAIL") << ' ' << c.passed << '/' << c.cases << "  worst "
                  << format_number(c.worst) << " (threshold " << format_number(c.threshold) << ")  " << c.name
                  << '\n';
      for (const auto& n : r.notes) std::cout << "  note: " << n << '\n';
    }
  }
  return all ? kOk : kFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ridesharing duopoly equilibrium analysis"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--scenario", o.scenario, "scenario file")->required();
    sub->add_option("--format", o.format, "output format")->check(CLI::IsMember({"text", "json"}));
    sub->add_option("--seed", o.seed, "random seed override");
    sub->add_option("--tol", o.tol, "algebraic tolerance override");
    sub->add_option("--epsilon", o.epsilon, "certification tolerance override");
    sub->add_option("--resolution", o.resolution, "oracle resolution override");
  };

  auto* solve = app.add_subcommand("solve", "solve every stage for each decision");
  auto* verify = app.add_subcommand("verify", "run an oracle/property suite");
  auto* classify = app.add_subcommand("classify", "classify decisions by collusion type");
  auto* deviate = app.add_subcommand("deviate", "unilateral deviation gain");
  auto* sweep = app.add_subcommand("sweep-csv", "write the sweep grid as CSV");
  auto* nash = app.add_subcommand("nash-certify", "grid epsilon-Nash certificate");
  auto* rate = app.add_subcommand("rate-equilibrium", "rate equilibrium with commissions at gas cost");
  for (auto* sub : {solve, verify, classify, deviate, sweep, nash, rate}) common(sub);
  verify->add_option("--suite", o.suite, "passenger | driver | theorem1 | constant-response | all");
  deviate->add_option("--deviator", o.deviator, "U or L")->required()->check(CLI::IsMember({"U", "L", "u", "l"}));
  deviate->add_option("--delta-r", o.delta_r, "rate change");
  deviate->add_option("--delta-c", o.delta_c, "commission change");
  sweep->add_option("--out", o.out, "output CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*solve) return cmd_solve(o);
    if (*verify) return cmd_verify(o);
    if (*classify) return cmd_classify(o);
    if (*deviate) return cmd_deviate(o);
    if (*sweep) return cmd_sweep_csv(o);
    if (*nash) return cmd_nash_certify(o);
    if (*rate) return cmd_rate_equilibrium(o);
  } catch (const ScenarioParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const FileError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDomain;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDomain;
  }
  return kUsage;
}
