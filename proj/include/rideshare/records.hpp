#pragma once

// Result records and their text, CSV and JSON-lines forms. Numbers are
// written as the shortest decimal that reads back to the value rounded to
// 15 significant digits.

#include <array>
#include <charconv>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>

#include <json.hpp>

#include "rideshare/analysis.hpp"
#include "rideshare/model.hpp"

namespace rideshare {

/// Round to 15 significant digits.
inline double round15(double v) {
  if (!std::isfinite(v) || v == 0.0) return v == 0.0 ? 0.0 : v;  // also folds -0 into 0
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::scientific, 14);
  double out = 0.0;
  std::from_chars(buf.data(), res.ptr, out);
  return out;
}

/// Shortest round-trip text of round15(v).
inline std::string format_number(double v) {
  const double r = round15(v);
  if (std::isnan(r)) return "nan";
  if (std::isinf(r)) return r > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), r);
  return std::string(buf.data(), res.ptr);
}

struct CertificateFields {
  double epsilon = 0.0;
  double max_gain_u = 0.0;
  double max_gain_l = 0.0;
  bool certified = false;
};

struct ResultRecord {
  MarketParams market;
  PlatformDecision decision;
  StageOutcome outcome;
  CollusionTag tag = CollusionTag::Competition;
  double balance = 0.0;
  std::optional<CertificateFields> certificate;
  bool tie = false;
  bool degenerate = false;  // no platform demand, or rates at the demand bound
  bool infeasible = false;  // matching constraint violated
};

/// Solve the lower stages for `dec` and classify it.
inline ResultRecord make_record(const PlatformDecision& dec, const MarketParams& params, double tol) {
  ResultRecord rec;
  rec.market = params;
  rec.decision = dec;
  rec.outcome = stage_outcome(dec, params);
  rec.tag = classify_collusion(dec, params, tol).tag;
  rec.balance = balance_residual(dec, params);
  rec.tie = rec.outcome.tie;
  rec.degenerate = rec.tag == CollusionTag::TrivialDegenerate || rec.outcome.split.platform_share() == 0.0;
  rec.infeasible = !validate_matching(rec.outcome.alloc, dec, params);
  return rec;
}

inline void attach_certificate(ResultRecord& rec, const NashCertificate& cert) {
  rec.certificate = CertificateFields{cert.epsilon, cert.max_gain_u, cert.max_gain_l, cert.certified};
}

// ---- CSV -------------------------------------------------------------------

inline constexpr const char* kCsvHeader =
    "r_u,c_u,r_l,c_l,lambda,gas,transit_rate,p_u,p_l,p_p,a_u,a_l,A,driver_profit,profit_u,profit_l,balance,tag,tie,"
    "degenerate";

inline std::string to_csv_row(const ResultRecord& r) {
  std::string out;
  auto num = [&](double v) {
    out += format_number(v);
    out += ',';
  };
  num(r.decision.r_u);
  num(r.decision.c_u);
  num(r.decision.r_l);
  num(r.decision.c_l);
  num(r.market.lambda);
  num(r.market.gas);
  num(r.market.transit_rate);
  num(r.outcome.split.p_u);
  num(r.outcome.split.p_l);
  num(r.outcome.split.p_p);
  num(r.outcome.alloc.a_u);
  num(r.outcome.alloc.a_l);
  num(r.outcome.alloc.total());
  num(r.outcome.driver_profit);
  num(r.outcome.profit_u);
  num(r.outcome.profit_l);
  num(r.balance);
  out += to_string(r.tag);
  out += r.tie ? ",1" : ",0";
  out += r.degenerate ? ",1" : ",0";
  return out;
}

// ---- JSON ------------------------------------------------------------------

inline nlohmann::json to_json(const ResultRecord& r) {
  using nlohmann::json;
  json j;
  j["market"] = {{"lambda", round15(r.market.lambda)},
                 {"gas", round15(r.market.gas)},
                 {"transit_rate", round15(r.market.transit_rate)}};
  j["decision"] = {{"r_u", round15(r.decision.r_u)},
                   {"c_u", round15(r.decision.c_u)},
                   {"r_l", round15(r.decision.r_l)},
                   {"c_l", round15(r.decision.c_l)}};
  j["split"] = {{"p_u", round15(r.outcome.split.p_u)},
                {"p_l", round15(r.outcome.split.p_l)},
                {"p_p", round15(r.outcome.split.p_p)}};
  j["alloc"] = {{"a_u", round15(r.outcome.alloc.a_u)}, {"a_l", round15(r.outcome.alloc.a_l)}};
  j["profits"] = {{"driver", round15(r.outcome.driver_profit)},
                  {"u", round15(r.outcome.profit_u)},
                  {"l", round15(r.outcome.profit_l)}};
  j["tag"] = to_string(r.tag);
  j["balance"] = round15(r.balance);
  if (r.certificate) {
    j["certificate"] = {{"epsilon", round15(r.certificate->epsilon)},
                        {"max_gain_u", round15(r.certificate->max_gain_u)},
                        {"max_gain_l", round15(r.certificate->max_gain_l)},
                        {"certified", r.certificate->certified}};
  }
  j["flags"] = {{"tie", r.tie}, {"degenerate", r.degenerate}, {"infeasible", r.infeasible}};
  return j;
}

inline std::string to_json_line(const ResultRecord& r) { return to_json(r).dump(); }

inline ResultRecord record_from_json(const nlohmann::json& j) {
  ResultRecord r;
  r.market = {j.at("market").at("lambda"), j.at("market").at("gas"), j.at("market").at("transit_rate")};
  const auto& d = j.at("decision");
  r.decision = {d.at("r_u"), d.at("c_u"), d.at("r_l"), d.at("c_l")};
  const auto& s = j.at("split");
  r.outcome.split = {s.at("p_u"), s.at("p_l"), s.at("p_p")};
  r.outcome.alloc = {j.at("alloc").at("a_u"), j.at("alloc").at("a_l")};
  const auto& p = j.at("profits");
  r.outcome.driver_profit = p.at("driver");
  r.outcome.profit_u = p.at("u");
  r.outcome.profit_l = p.at("l");
  const auto tag = collusion_tag_from_string(j.at("tag").get<std::string>());
  if (!tag) throw std::invalid_argument("unknown collusion tag");
  r.tag = *tag;
  r.balance = j.at("balance");
  if (j.contains("certificate")) {
    const auto& c = j.at("certificate");
    r.certificate = CertificateFields{c.at("epsilon"), c.at("max_gain_u"), c.at("max_gain_l"), c.at("certified")};
  }
  const auto& f = j.at("flags");
  r.tie = f.at("tie");
  r.outcome.tie = r.tie;
  r.degenerate = f.at("degenerate");
  r.infeasible = f.at("infeasible");
  return r;
}

inline ResultRecord record_from_json_line(const std::string& line) {
  return record_from_json(nlohmann::json::parse(line));
}

// ---- human-readable ----------------------------------------------------------

inline std::string to_text(const ResultRecord& r) {
  std::ostringstream os;
  auto row = [&](const char* label, const std::string& value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "  %-14s", label);
    os << buf << value << '\n';
  };
  const auto& o = r.outcome;
  row("decision", "r_u=" + format_number(r.decision.r_u) + " c_u=" + format_number(r.decision.c_u) +
                      " r_l=" + format_number(r.decision.r_l) + " c_l=" + format_number(r.decision.c_l));
  row("passengers", "p_u=" + format_number(o.split.p_u) + " p_l=" + format_number(o.split.p_l) +
                        " p_p=" + format_number(o.split.p_p));
  row("drivers", "a_u=" + format_number(o.alloc.a_u) + " a_l=" + format_number(o.alloc.a_l) +
                     " A=" + format_number(o.alloc.total()));
  row("profits", "U=" + format_number(o.profit_u) + " L=" + format_number(o.profit_l) +
                     " drivers=" + format_number(o.driver_profit));
  row("collusion", std::string(to_string(r.tag)) + " (balance " + format_number(r.balance) + ")");
  if (r.certificate)
    row("certificate", std::string(r.certificate->certified ? "certified" : "not certified") +
                           " eps=" + format_number(r.certificate->epsilon) +
                           " gain_u=" + format_number(r.certificate->max_gain_u) +
                           " gain_l=" + format_number(r.certificate->max_gain_l));
  std::string flags;
  if (r.tie) flags += " tie";
  if (r.degenerate) flags += " degenerate";
  if (r.infeasible) flags += " infeasible";
  row("flags", flags.empty() ? "-" : flags.substr(1));
  return os.str();
}

}  // namespace rideshare
