#pragma once

#include <string>

namespace gaussig {

enum class YoungKind {
  CoshMinusOne,  // cosh(x) - 1
  CoshConj,      // y asinh(y) - sqrt(1 + y^2) + 1, the Legendre conjugate of cosh - 1
  ExpPhi,        // e^x - 1 - x
  LogPsi,        // (1 + y) log(1 + y) - y, the conjugate of ExpPhi
};

std::string young_name(YoungKind y);
/// Parses the names produced by young_name; throws ConfigError.
YoungKind young_from_name(const std::string& s);

YoungKind conjugate(YoungKind y);

/// Y(|t|), computed without cancellation for small |t|; +inf on overflow.
double young_eval(YoungKind y, double t);
/// log Y(|t|), finite where Y itself would overflow; -inf at t = 0.
double young_log(YoungKind y, double t);
/// Y'(t) for t >= 0 (odd extension for t < 0).
double young_derivative(YoungKind y, double t);

}  // namespace gaussig
