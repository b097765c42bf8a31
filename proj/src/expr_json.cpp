#include "gaussig/expr_json.hpp"

#include <string>

#include "gaussig/error.hpp"

namespace gaussig {

using nlohmann::json;

json expr_to_json(const Expr& e) {
  const Node& n = e.node();
  json j;
  j["op"] = op_name(n.op);
  switch (n.op) {
    case Op::Constant: j["value"] = n.value; break;
    case Op::Coordinate: j["index"] = n.index; break;
    case Op::Affine:
      j["coeffs"] = n.vec;
      j["offset"] = n.value;
      break;
    case Op::Add:
    case Op::Mul:
    case Op::Min:
    case Op::Max:
      j["args"] = json::array({expr_to_json(n.kids[0]), expr_to_json(n.kids[1])});
      break;
    case Op::Scale:
      j["factor"] = n.value;
      j["arg"] = expr_to_json(n.kids[0]);
      break;
    case Op::Power:
      j["exponent"] = n.index;
      j["arg"] = expr_to_json(n.kids[0]);
      break;
    case Op::ComposeAffine: {
      json rows = json::array();
      for (std::size_t i = 0; i < n.vec.size(); ++i) {
        rows.push_back(std::vector<double>(n.matrix.begin() + i * n.cols, n.matrix.begin() + (i + 1) * n.cols));
      }
      j["arg"] = expr_to_json(n.kids[0]);
      j["matrix"] = rows;
      j["offset"] = n.vec;
      break;
    }
    case Op::Bump:
      j["center"] = n.vec;
      j["radius"] = n.value;
      j["order"] = n.index;
      break;
    case Op::IndicatorBall:
      j["radius"] = n.value;
      j["dimension"] = n.index;
      break;
    default: j["arg"] = expr_to_json(n.kids[0]); break;
  }
  return j;
}

namespace {

const json& field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(std::string("expression node missing \"") + key + "\": " + j.dump());
  return *it;
}

double number(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number()) throw ConfigError(std::string("\"") + key + "\" must be a number");
  return v.get<double>();
}

unsigned whole(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ConfigError(std::string("\"") + key + "\" must be a nonnegative integer");
  }
  return v.get<unsigned>();
}

std::vector<double> numbers(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_array()) throw ConfigError(std::string("\"") + key + "\" must be an array");
  std::vector<double> out;
  for (const json& x : v) {
    if (!x.is_number()) throw ConfigError(std::string("\"") + key + "\" must hold numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

std::vector<Expr> args(const json& j) {
  const json& v = field(j, "args");
  if (!v.is_array() || v.empty()) throw ConfigError("\"args\" must be a nonempty array");
  std::vector<Expr> out;
  for (const json& x : v) out.push_back(expr_from_json(x));
  return out;
}

Expr parse(const json& j) {
  if (!j.is_object()) throw ConfigError("expression node must be an object: " + j.dump());
  const json& tag = field(j, "op");
  if (!tag.is_string()) throw ConfigError("\"op\" must be a string");
  const std::string op = tag.get<std::string>();

  if (op == "const") return Expr::constant(number(j, "value"));
  if (op == "coord") return Expr::coordinate(whole(j, "index"));
  if (op == "affine") return Expr::affine(numbers(j, "coeffs"), j.contains("offset") ? number(j, "offset") : 0.0);
  if (op == "add" || op == "mul") {
    auto a = args(j);
    Expr acc = a[0];
    for (std::size_t i = 1; i < a.size(); ++i) acc = op == "add" ? acc + a[i] : acc * a[i];
    return acc;
  }
  if (op == "sub" || op == "min" || op == "max") {
    auto a = args(j);
    if (a.size() != 2) throw ConfigError("\"" + op + "\" takes exactly two args");
    if (op == "sub") return a[0] - a[1];
    return op == "min" ? min(a[0], a[1]) : max(a[0], a[1]);
  }
  if (op == "scale") return scale(number(j, "factor"), parse(field(j, "arg")));
  if (op == "pow") return pow(parse(field(j, "arg")), whole(j, "exponent"));
  if (op == "compose_affine") {
    const json& rows = field(j, "matrix");
    if (!rows.is_array()) throw ConfigError("\"matrix\" must be an array of rows");
    std::vector<double> m;
    std::size_t cols = 0;
    for (const json& r : rows) {
      if (!r.is_array()) throw ConfigError("\"matrix\" rows must be arrays");
      if (cols == 0) cols = r.size();
      if (r.size() != cols) throw ConfigError("\"matrix\" rows must have equal length");
      for (const json& x : r) m.push_back(x.get<double>());
    }
    auto off = numbers(j, "offset");
    if (off.size() != rows.size()) throw ConfigError("\"offset\" length must match matrix rows");
    return compose_affine(parse(field(j, "arg")), std::move(m), std::move(off));
  }
  if (op == "translate") {
    auto h = numbers(j, "shift");
    return translate(parse(field(j, "arg")), h);
  }
  if (op == "bump") {
    return Expr::bump(numbers(j, "center"), number(j, "radius"), j.contains("order") ? whole(j, "order") : 0u);
  }
  if (op == "indicator_ball") return Expr::indicator_ball(number(j, "radius"), whole(j, "dimension"));
  if (op == "hermite") return hermite(whole(j, "degree"), j.contains("index") ? whole(j, "index") : 0u);

  const Expr a = [&] {
    if (!j.contains("arg")) throw ConfigError("unknown expression op \"" + op + "\"");
    return parse(j.at("arg"));
  }();
  if (op == "neg") return -a;
  if (op == "abs") return abs(a);
  if (op == "exp") return exp(a);
  if (op == "log") return log(a);
  if (op == "cosh") return cosh(a);
  if (op == "sinh") return sinh(a);
  if (op == "asinh") return asinh(a);
  if (op == "tanh") return tanh(a);
  if (op == "sqrt") return sqrt(a);
  if (op == "recip") return recip(a);
  if (op == "atan") return atan(a);
  if (op == "smoothstep") return smooth_step(a);
  if (op == "smoothstep_d1") return smooth_step_d1(a);
  throw ConfigError("unknown expression op \"" + op + "\"");
}

}  // namespace

Expr expr_from_json(const json& j) {
  try {
    return parse(j);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("invalid expression: ") + e.what());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid expression: ") + e.what());
  }
}

}  // namespace gaussig
