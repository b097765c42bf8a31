#include "gaussig/check_report.hpp"

#include <cmath>
#include <cstdio>

#include "gaussig/error.hpp"

namespace gaussig {

CheckReport make_le(std::string name, double lhs, double rhs, double tolerance, std::string note, double error_estimate) {
  CheckReport r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.margin = rhs - lhs;
  r.tolerance = tolerance;
  r.pass = std::isfinite(r.margin) ? r.margin >= -tolerance : (std::isinf(rhs) && rhs > 0 && std::isfinite(lhs));
  r.error_estimate = error_estimate;
  r.note = std::move(note);
  return r;
}

CheckReport make_eq(std::string name, double a, double b, double tolerance, std::string note, double error_estimate) {
  const double d = std::fabs(a - b);
  CheckReport r = make_le(std::move(name), d, 0.0, tolerance, std::move(note), error_estimate);
  if (std::isnan(d)) r.pass = false;
  return r;
}

CheckReport make_verdict(std::string name, bool ok, std::string note) {
  return make_le(std::move(name), 0.0, ok ? 1.0 : -1.0, 0.0, std::move(note));
}

CheckReport combine(std::string name, const std::vector<CheckReport>& parts, std::string note) {
  CheckReport r;
  r.name = std::move(name);
  r.note = std::move(note);
  r.pass = true;
  if (parts.empty()) {
    r.rhs = 1.0;
    r.margin = 1.0;
    return r;
  }
  const CheckReport* worst = &parts.front();
  for (const CheckReport& p : parts) {
    r.pass = r.pass && p.pass;
    r.error_estimate = std::max(r.error_estimate, p.error_estimate);
    const double slack = p.margin + p.tolerance;
    const double worst_slack = worst->margin + worst->tolerance;
    if ((!p.pass && worst->pass) || (p.pass == worst->pass && slack < worst_slack)) worst = &p;
  }
  r.lhs = worst->lhs;
  r.rhs = worst->rhs;
  r.margin = worst->margin;
  r.tolerance = worst->tolerance;
  if (r.note.empty()) r.note = "worst: " + worst->name;
  else r.note += "; worst: " + worst->name;
  return r;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

// JSON has no inf/NaN; non-finite values travel as strings.
nlohmann::json num(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

double from_num(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    if (s == "nan") return NAN;
  }
  throw IOFailure("malformed number in report: " + j.dump());
}

}  // namespace

nlohmann::json to_json(const CheckReport& r) {
  return {{"name", r.name},         {"lhs", num(r.lhs)},
          {"rhs", num(r.rhs)},      {"margin", num(r.margin)},
          {"pass", r.pass},         {"tolerance", num(r.tolerance)},
          {"error_estimate", num(r.error_estimate)}, {"note", r.note}};
}

CheckReport check_from_json(const nlohmann::json& j) {
  try {
    CheckReport r;
    r.name = j.at("name").get<std::string>();
    r.lhs = from_num(j.at("lhs"));
    r.rhs = from_num(j.at("rhs"));
    r.margin = from_num(j.at("margin"));
    r.pass = j.at("pass").get<bool>();
    r.tolerance = from_num(j.at("tolerance"));
    r.error_estimate = j.contains("error_estimate") ? from_num(j.at("error_estimate")) : 0.0;
    r.note = j.value("note", "");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw IOFailure(std::string("malformed check record: ") + e.what());
  }
}

}  // namespace gaussig
