#include "srcf/instance.hpp"

#include <cstdio>
#include <set>

#include "srcf/error.hpp"

namespace srcf {

namespace {

Error parse_error(const std::string& field, const std::string& what) {
  return Error(ErrorCode::kParse, field + ": " + what);
}

Integer json_integer(const nlohmann::json& j, const std::string& field) {
  if (j.is_number_integer()) return j.is_number_unsigned() ? Integer(j.get<std::uint64_t>()) : Integer(j.get<std::int64_t>());
  if (j.is_string()) {
    try {
      const Rational r = parse_rational(j.get<std::string>());
      if (denominator(r) == 1) return numerator(r);
    } catch (const Error&) {
    }
  }
  throw parse_error(field, "expected an integer (number or decimal string)");
}

Rational json_rational(const nlohmann::json& j, const std::string& field) {
  if (j.is_number_integer()) return Rational(json_integer(j, field));
  if (j.is_string()) {
    try {
      return parse_rational(j.get<std::string>());
    } catch (const Error& e) {
      throw parse_error(field, e.what());
    }
  }
  throw parse_error(field, "expected an exact value such as \"3/7\" or \"0.125\" (as a string)");
}

long double json_real(const nlohmann::json& j, const std::string& field) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return to_long_double(json_rational(j, field));
  throw parse_error(field, "expected a number");
}

std::uint64_t json_count(const nlohmann::json& j, const std::string& field) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0)) {
    throw parse_error(field, "expected a nonnegative integer");
  }
  return j.get<std::uint64_t>();
}

template <class T, class F>
std::vector<T> json_array(const nlohmann::json& j, const std::string& field, F item) {
  if (!j.is_array()) throw parse_error(field, "expected an array");
  std::vector<T> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(item(j[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

nlohmann::json number_input_to_json(const NumberInput& x) {
  return std::visit(
      [](const auto& v) -> nlohmann::json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Rational>) {
          return {{"kind", "rational"}, {"value", to_string(v)}};
        } else if constexpr (std::is_same_v<T, QuadraticSurd>) {
          return {{"kind", "surd"}, {"p", to_string(v.p)}, {"q", to_string(v.q)}, {"r", to_string(v.r)}, {"d", to_string(v.d)}};
        } else {
          return {{"kind", "decimal"}, {"value", to_string(v.value)}, {"radius", to_string(v.radius)}};
        }
      },
      x.kind());
}

NumberInput number_input_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    throw parse_error("x", "expected an object with a string 'kind'");
  }
  const std::string kind = j["kind"];
  const auto allow = [&](std::initializer_list<const char*> keys) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return it.key() == k; })) {
        throw parse_error("x", "unknown field '" + it.key() + "'");
      }
    }
  };
  if (kind == "rational") {
    allow({"kind", "value"});
    return NumberInput::rational(json_rational(j.at("value"), "x.value"));
  }
  if (kind == "surd") {
    allow({"kind", "p", "q", "r", "d"});
    return NumberInput::surd(json_integer(j.at("p"), "x.p"), json_integer(j.at("q"), "x.q"),
                             json_integer(j.at("r"), "x.r"), json_integer(j.at("d"), "x.d"));
  }
  if (kind == "decimal") {
    allow({"kind", "value", "radius"});
    return NumberInput::decimal(json_rational(j.at("value"), "x.value"),
                                j.contains("radius") ? json_rational(j["radius"], "x.radius") : Rational(0));
  }
  throw parse_error("x", "unknown kind '" + kind + "'");
}

nlohmann::json ProblemInstance::to_json() const {
  nlohmann::json j{{"schema", kInstanceSchema}};
  if (sigma) j["sigma"] = sigma->to_json();
  if (b) j["B"] = b->to_json();
  if (f) j["f"] = f->to_json();
  if (x) j["x"] = number_input_to_json(*x);
  if (digits) j["digits"] = *digits;
  if (signs) {
    nlohmann::json a = nlohmann::json::array();
    for (Sign s : *signs) a.push_back(value(s));
    j["signs"] = a;
  }
  if (point) j["point"] = to_string(*point);
  if (depth) j["depth"] = *depth;
  if (seed) j["seed"] = *seed;
  if (tolerance) j["tolerance"] = static_cast<double>(*tolerance);
  if (epsilon) j["epsilon"] = static_cast<double>(*epsilon);
  if (delta) j["delta"] = static_cast<double>(*delta);
  if (epsilons) {
    nlohmann::json a = nlohmann::json::array();
    for (long double e : *epsilons) a.push_back(static_cast<double>(e));
    j["epsilons"] = a;
  }
  if (s) j["s"] = static_cast<double>(*s);
  if (depths) j["depths"] = *depths;
  if (mode) j["mode"] = *mode;
  if (horizon) j["horizon"] = *horizon;
  if (alphabet) j["alphabet"] = *alphabet;
  if (precision_bits) j["precision_bits"] = *precision_bits;
  if (audit_depth) j["audit_depth"] = *audit_depth;
  if (audit_width) j["audit_width"] = *audit_width;
  return j;
}

std::string ProblemInstance::hash() const {
  const std::string text = to_json().dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ProblemInstance instance_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw parse_error("instance", "top level must be an object");
  static const std::set<std::string> known{"schema", "sigma", "B", "f", "x", "digits", "signs", "point",
                                           "depth", "seed", "tolerance", "epsilon", "delta", "epsilons",
                                           "s", "depths", "mode", "horizon", "alphabet", "precision_bits",
                                           "audit_depth", "audit_width"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known.count(it.key())) throw parse_error("instance", "unknown field '" + it.key() + "'");
  }
  if (j.contains("schema") && j["schema"] != kInstanceSchema) {
    throw parse_error("schema", std::string("expected \"") + kInstanceSchema + "\"");
  }
  ProblemInstance p;
  const auto wrap = [](const char* field, auto fn) {
    try {
      return fn();
    } catch (const nlohmann::json::exception& e) {
      throw parse_error(field, e.what());
    }
  };
  if (j.contains("sigma")) p.sigma = wrap("sigma", [&] { return SignSequence::from_json(j["sigma"]); });
  if (j.contains("B")) p.b = wrap("B", [&] { return DigitSet::from_json(j["B"]); });
  if (j.contains("f")) p.f = wrap("f", [&] { return GrowthFunction::from_json(j["f"]); });
  if (j.contains("x")) p.x = wrap("x", [&] { return number_input_from_json(j["x"]); });
  if (j.contains("digits")) {
    p.digits = json_array<Digit>(j["digits"], "digits", [](const nlohmann::json& v, const std::string& f) {
      return json_count(v, f);
    });
  }
  if (j.contains("signs")) {
    p.signs = json_array<Sign>(j["signs"], "signs", [](const nlohmann::json& v, const std::string& f) {
      if (!v.is_number_integer() || (v.get<long>() != 1 && v.get<long>() != -1)) throw parse_error(f, "expected +1 or -1");
      return sign_from_int(v.get<long>());
    });
  }
  if (j.contains("point")) p.point = json_rational(j["point"], "point");
  if (j.contains("depth")) p.depth = json_count(j["depth"], "depth");
  if (j.contains("seed")) p.seed = json_count(j["seed"], "seed");
  if (j.contains("tolerance")) p.tolerance = json_real(j["tolerance"], "tolerance");
  if (j.contains("epsilon")) p.epsilon = json_real(j["epsilon"], "epsilon");
  if (j.contains("delta")) p.delta = json_real(j["delta"], "delta");
  if (j.contains("epsilons")) p.epsilons = json_array<long double>(j["epsilons"], "epsilons", json_real);
  if (j.contains("s")) p.s = json_real(j["s"], "s");
  if (j.contains("depths")) p.depths = json_array<std::uint64_t>(j["depths"], "depths", json_count);
  if (j.contains("mode")) {
    if (!j["mode"].is_string() || (j["mode"] != "exact" && j["mode"] != "factorized")) {
      throw parse_error("mode", "expected \"exact\" or \"factorized\"");
    }
    p.mode = j["mode"].get<std::string>();
  }
  if (j.contains("horizon")) p.horizon = json_count(j["horizon"], "horizon");
  if (j.contains("alphabet")) p.alphabet = json_array<Digit>(j["alphabet"], "alphabet", json_count);
  if (j.contains("precision_bits")) p.precision_bits = static_cast<unsigned>(json_count(j["precision_bits"], "precision_bits"));
  if (j.contains("audit_depth")) p.audit_depth = json_count(j["audit_depth"], "audit_depth");
  if (j.contains("audit_width")) p.audit_width = json_count(j["audit_width"], "audit_width");
  return p;
}

ProblemInstance parse_instance(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    std::string what = e.what();
    // drop nlohmann's "[json.exception.parse_error.101] parse error at line 1, column 2: " prefix
    if (const auto pos = what.find(": "); pos != std::string::npos) what = what.substr(pos + 2);
    throw Error(ErrorCode::kParse, "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + what,
                line);
  }
  return instance_from_json(j);
}

}  // namespace srcf
