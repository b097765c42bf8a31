#pragma once

// JSON form of expression trees. Every node is an object with an "op" tag:
//
//   {"op": "const", "value": c}
//   {"op": "coord", "index": j}                      (0-based)
//   {"op": "affine", "coeffs": [a0, ...], "offset": b}
//   {"op": "add" | "mul", "args": [e, e, ...]}        (n-ary, folded left)
//   {"op": "sub", "args": [e, e]}
//   {"op": "scale", "factor": c, "arg": e}
//   {"op": "pow", "exponent": k, "arg": e}
//   {"op": "neg" | "abs" | "exp" | "log" | "cosh" | "sinh" | "asinh" | "tanh" |
//          "sqrt" | "recip" | "atan" | "smoothstep" | "smoothstep_d1", "arg": e}
//   {"op": "min" | "max", "args": [e, e]}
//   {"op": "compose_affine", "arg": e, "matrix": [[...], ...], "offset": [...]}
//   {"op": "translate", "arg": e, "shift": [...]}
//   {"op": "bump", "center": [...], "radius": r, "order": k}
//   {"op": "indicator_ball", "radius": R, "dimension": d}
//   {"op": "hermite", "degree": k, "index": j}

#include <nlohmann/json.hpp>

#include "gaussig/expr.hpp"

namespace gaussig {

nlohmann::json expr_to_json(const Expr& e);

/// Throws ConfigError on malformed input.
Expr expr_from_json(const nlohmann::json& j);

}  // namespace gaussig
