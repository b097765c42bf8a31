#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace gaussig {

/// Outcome of one inequality or identity check. margin = rhs - lhs and
/// pass <=> margin >= -tolerance.
struct CheckReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  bool pass = false;
  double tolerance = 0.0;
  double error_estimate = 0.0;  // quadrature error carried by the two sides
  std::string note;
};

/// lhs <= rhs within tolerance.
CheckReport make_le(std::string name, double lhs, double rhs, double tolerance, std::string note = {},
                    double error_estimate = 0.0);
/// |a - b| <= tolerance, reported as lhs = |a - b|, rhs = 0.
CheckReport make_eq(std::string name, double a, double b, double tolerance, std::string note = {},
                    double error_estimate = 0.0);
/// A yes/no verdict: lhs = 0, rhs = 1 on pass, rhs = -1 on fail.
CheckReport make_verdict(std::string name, bool ok, std::string note = {});

/// Combines sub-checks: passes iff all pass; lhs/rhs/margin from the worst one.
CheckReport combine(std::string name, const std::vector<CheckReport>& parts, std::string note = {});

nlohmann::json to_json(const CheckReport& r);
CheckReport check_from_json(const nlohmann::json& j);

/// printf("%.17g") rendering used by reports.
std::string format_number(double v);

}  // namespace gaussig
