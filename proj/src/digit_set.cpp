#include "srcf/digit_set.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/multiprecision/miller_rabin.hpp>

#include "srcf/error.hpp"

namespace srcf {

namespace {

constexpr long double kInf = std::numeric_limits<long double>::infinity();
constexpr std::size_t kExactTerms = 256;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool is_prime(const Integer& n) {
  if (n < 2) return false;
  for (unsigned p : {2u, 3u, 5u, 7u, 11u, 13u, 17u, 19u, 23u, 29u, 31u, 37u}) {
    if (n == p) return true;
    if (n % p == 0) return false;
  }
  return boost::multiprecision::miller_rabin_test(n, 25);
}

std::optional<Digit> fit(const std::optional<Integer>& v) {
  if (!v || *v > Integer(std::numeric_limits<Digit>::max())) return std::nullopt;
  return v->convert_to<Digit>();
}

// Bracket for sum_{k >= start} k^{-e}. k^{-e} is convex, so the trapezoid rule bounds the
// sum from below and the midpoint rule from above.
SeriesBracket zeta_tail(long double e, const Integer& start) {
  if (e <= 1) return {kInf, kInf};
  const long double log_k = log_abs(start);
  const long double log_mid = log_k + std::log1p(-0.5L * std::exp(-log_k));
  const long double lower = std::exp((1 - e) * log_k) / (e - 1) + 0.5L * std::exp(-e * log_k);
  const long double upper = std::exp((1 - e) * log_mid) / (e - 1);
  return {lower, upper};
}

void require_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed, const char* where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return it.key() == k; })) {
      throw Error(ErrorCode::kParse, std::string("unknown field ") + where + "." + it.key());
    }
  }
}

Digit json_digit(const nlohmann::json& j, const char* what) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0)) {
    throw Error(ErrorCode::kParse, std::string(what) + " must be a nonnegative integer");
  }
  return j.get<Digit>();
}

}  // namespace

DigitSet DigitSet::naturals() { return DigitSet(Naturals{}); }

DigitSet DigitSet::powers(unsigned exponent) {
  if (exponent == 0) throw Error(ErrorCode::kInvalidArgument, "power digit set needs exponent >= 1");
  if (exponent == 1) return naturals();
  return DigitSet(Powers{exponent});
}

DigitSet DigitSet::geometric(Digit c, Digit r) {
  if (c == 0 || r < 2) throw Error(ErrorCode::kInvalidArgument, "geometric digit set needs c >= 1, r >= 2");
  return DigitSet(Geometric{c, r});
}

DigitSet DigitSet::polynomial(std::vector<Digit> coefficients) {
  while (!coefficients.empty() && coefficients.back() == 0) coefficients.pop_back();
  if (coefficients.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "polynomial digit set needs degree >= 1");
  }
  return DigitSet(Polynomial{std::move(coefficients)});
}

DigitSet DigitSet::primes() { return DigitSet(Primes{}); }

DigitSet DigitSet::finite(std::vector<Digit> elements) {
  std::sort(elements.begin(), elements.end());
  elements.erase(std::unique(elements.begin(), elements.end()), elements.end());
  if (elements.empty() || elements.front() == 0) {
    throw Error(ErrorCode::kInvalidArgument, "explicit digit set must be a nonempty set of positive integers");
  }
  return DigitSet(Explicit{std::move(elements), nullptr});
}

DigitSet DigitSet::with_tail(std::vector<Digit> head, DigitSet tail) {
  std::sort(head.begin(), head.end());
  head.erase(std::unique(head.begin(), head.end()), head.end());
  if (!head.empty() && head.front() == 0) {
    throw Error(ErrorCode::kInvalidArgument, "digit set elements must be positive");
  }
  return DigitSet(Explicit{std::move(head), std::make_shared<const DigitSet>(std::move(tail))});
}

bool DigitSet::is_finite() const {
  const auto* e = std::get_if<Explicit>(&kind_);
  return e && (!e->tail || e->tail->is_finite());
}

Digit DigitSet::min() const { return *next(Digit{1}); }

Integer DigitSet::element_at(const Integer& k) const {
  return std::visit(Overloaded{
                        [&](const Naturals&) { return k; },
                        [&](const Powers& p) { return Integer(boost::multiprecision::pow(k, p.exponent)); },
                        [&](const Geometric& g) {
                          return Integer(g.c * boost::multiprecision::pow(Integer(g.r), k.convert_to<unsigned>()));
                        },
                        [&](const Polynomial& p) {
                          Integer v = 0;
                          for (auto it = p.coefficients.rbegin(); it != p.coefficients.rend(); ++it) {
                            v = v * k + *it;
                          }
                          return v;
                        },
                        [&](const auto&) -> Integer {
                          throw Error(ErrorCode::kInvalidArgument, "digit set kind is not index-parametrized");
                        },
                    },
                    kind_);
}

Integer DigitSet::index_at_least(const Integer& x) const {
  if (std::holds_alternative<Naturals>(kind_)) return x < 1 ? Integer(1) : x;
  const Integer first = std::holds_alternative<Geometric>(kind_) ? Integer(0) : Integer(1);
  if (element_at(first) >= x) return first;
  // element_at(lo) < x <= element_at(hi)
  Integer lo = first;
  Integer hi = first + 1;
  while (element_at(hi) < x) {
    lo = hi;
    hi *= 2;
  }
  while (hi - lo > 1) {
    const Integer mid = (lo + hi) / 2;
    if (element_at(mid) < x) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

std::optional<Integer> DigitSet::next(const Integer& x) const {
  return std::visit(Overloaded{
                        [&](const Primes&) -> std::optional<Integer> {
                          Integer n = x < 2 ? Integer(2) : x;
                          while (!is_prime(n)) ++n;
                          return n;
                        },
                        [&](const Explicit& e) -> std::optional<Integer> {
                          for (Digit h : e.head) {
                            if (Integer(h) >= x) return Integer(h);
                          }
                          if (!e.tail) return std::nullopt;
                          const Integer above = e.head.empty() ? Integer(1) : Integer(e.head.back()) + 1;
                          return e.tail->next(x < above ? above : x);
                        },
                        [&](const auto&) -> std::optional<Integer> { return element_at(index_at_least(x)); },
                    },
                    kind_);
}

std::optional<Digit> DigitSet::next(Digit x) const { return fit(next(Integer(x))); }

bool DigitSet::contains(const Integer& k) const {
  if (k < 1) return false;
  const auto n = next(k);
  return n && *n == k;
}

std::vector<Digit> DigitSet::elements(Digit lo, Digit hi) const {
  std::vector<Digit> out;
  if (lo >= hi) return out;
  if (std::holds_alternative<Naturals>(kind_)) {
    for (Digit k = std::max<Digit>(lo, 1); k < hi; ++k) out.push_back(k);
    return out;
  }
  if (std::holds_alternative<Primes>(kind_) || std::holds_alternative<Explicit>(kind_)) {
    for (auto k = next(lo); k && *k < hi; k = next(*k + 1)) out.push_back(*k);
    return out;
  }
  for (Integer idx = index_at_least(lo);; ++idx) {
    const Integer v = element_at(idx);
    if (v >= hi) break;
    out.push_back(v.convert_to<Digit>());
  }
  return out;
}

std::uint64_t DigitSet::count(Digit lo, Digit hi) const {
  if (lo >= hi) return 0;
  if (std::holds_alternative<Primes>(kind_) || std::holds_alternative<Explicit>(kind_)) {
    return elements(lo, hi).size();
  }
  return (index_at_least(hi) - index_at_least(lo)).convert_to<std::uint64_t>();
}

std::vector<Integer> DigitSet::elements_from(const Integer& from, std::size_t count) const {
  std::vector<Integer> out;
  std::optional<Integer> k = next(from);
  while (k && out.size() < count) {
    out.push_back(*k);
    k = next(Integer(*k + 1));
  }
  return out;
}

SeriesBracket DigitSet::analytic_tail(long double s, const Integer& index) const {
  return std::visit(
      Overloaded{
          [&](const Naturals&) { return zeta_tail(s, index); },
          [&](const Powers& p) { return zeta_tail(s * p.exponent, index); },
          [&](const Polynomial& p) {
            const auto degree = static_cast<long double>(p.coefficients.size() - 1);
            long double total = 0;
            for (Digit c : p.coefficients) total += static_cast<long double>(c);
            // c_d k^d <= p(k) <= (sum c_i) k^d for k >= 1
            const SeriesBracket z = zeta_tail(s * degree, index);
            const auto lead = static_cast<long double>(p.coefficients.back());
            return SeriesBracket{z.lo * std::pow(total, -s), z.hi * std::pow(lead, -s)};
          },
          [&](const Geometric& g) {
            if (s <= 0) return SeriesBracket{kInf, kInf};
            const long double log_first = std::log(static_cast<long double>(g.c)) +
                                          index.convert_to<long double>() * std::log(static_cast<long double>(g.r));
            const long double v = std::exp(-s * log_first) / (1 - std::pow(static_cast<long double>(g.r), -s));
            return SeriesBracket{v, v};
          },
          [&](const Primes&) {
            // primes are a subset of N
            const SeriesBracket z = zeta_tail(s, index);
            return SeriesBracket{0, z.hi};
          },
          [&](const Explicit&) { return SeriesBracket{0, 0}; },
      },
      kind_);
}

SeriesBracket DigitSet::tail_sum(long double s, const Integer& from) const {
  if (const auto* e = std::get_if<Explicit>(&kind_)) {
    CompensatedSum head;
    for (Digit h : e->head) {
      if (Integer(h) >= from) head.add(std::pow(static_cast<long double>(h), -s));
    }
    SeriesBracket out{head.value(), head.value()};
    if (e->tail) {
      const Integer above = e->head.empty() ? Integer(1) : Integer(e->head.back()) + 1;
      const SeriesBracket t = e->tail->tail_sum(s, from < above ? above : from);
      out.lo += t.lo;
      out.hi += t.hi;
    }
    return out;
  }
  CompensatedSum exact;
  Integer resume;
  if (std::holds_alternative<Primes>(kind_)) {
    Integer p = *next(from);
    for (std::size_t i = 0; i < kExactTerms; ++i) {
      exact.add(std::exp(-s * log_abs(p)));
      p = *next(Integer(p + 1));
    }
    resume = p;
  } else {
    Integer idx = index_at_least(from);
    for (std::size_t i = 0; i < kExactTerms; ++i, ++idx) exact.add(std::exp(-s * log_abs(element_at(idx))));
    resume = idx;
  }
  const SeriesBracket t = analytic_tail(s, resume);
  // one ulp-scale allowance for the floating evaluation of the exact part
  const long double e = exact.value();
  return {e * (1 - 1e-15L) + t.lo, e * (1 + 1e-15L) + t.hi};
}

std::optional<Rational> DigitSet::tau_closed_form() const {
  return std::visit(Overloaded{
                        [](const Naturals&) -> std::optional<Rational> { return Rational(1); },
                        [](const Powers& p) -> std::optional<Rational> { return Rational(1, p.exponent); },
                        [](const Geometric&) -> std::optional<Rational> { return Rational(0); },
                        [](const Polynomial& p) -> std::optional<Rational> {
                          return Rational(1, static_cast<long>(p.coefficients.size() - 1));
                        },
                        [](const Primes&) -> std::optional<Rational> { return Rational(1); },
                        [](const Explicit& e) -> std::optional<Rational> {
                          if (!e.tail) return Rational(0);
                          return e.tail->tau_closed_form();
                        },
                    },
                    kind_);
}

nlohmann::json DigitSet::to_json() const {
  return std::visit(
      Overloaded{
          [](const Naturals&) { return nlohmann::json{{"kind", "naturals"}}; },
          [](const Powers& p) { return nlohmann::json{{"kind", "powers"}, {"exponent", p.exponent}}; },
          [](const Geometric& g) { return nlohmann::json{{"kind", "geometric"}, {"c", g.c}, {"r", g.r}}; },
          [](const Polynomial& p) {
            return nlohmann::json{{"kind", "polynomial"}, {"coefficients", p.coefficients}};
          },
          [](const Primes&) { return nlohmann::json{{"kind", "primes"}}; },
          [](const Explicit& e) {
            nlohmann::json j{{"kind", "explicit"}, {"elements", e.head}};
            if (e.tail) j["tail"] = e.tail->to_json();
            return j;
          },
      },
      kind_);
}

DigitSet DigitSet::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    throw Error(ErrorCode::kParse, "B must be an object with a string 'kind'");
  }
  const std::string kind = j["kind"];
  if (kind == "naturals") {
    require_keys(j, {"kind"}, "B");
    return naturals();
  }
  if (kind == "powers") {
    require_keys(j, {"kind", "exponent"}, "B");
    return powers(static_cast<unsigned>(json_digit(j.at("exponent"), "B.exponent")));
  }
  if (kind == "geometric") {
    require_keys(j, {"kind", "c", "r"}, "B");
    return geometric(j.contains("c") ? json_digit(j["c"], "B.c") : 1, json_digit(j.at("r"), "B.r"));
  }
  if (kind == "polynomial") {
    require_keys(j, {"kind", "coefficients"}, "B");
    std::vector<Digit> c;
    for (const auto& v : j.at("coefficients")) c.push_back(json_digit(v, "B.coefficients"));
    return polynomial(std::move(c));
  }
  if (kind == "primes") {
    require_keys(j, {"kind"}, "B");
    return primes();
  }
  if (kind == "explicit") {
    require_keys(j, {"kind", "elements", "tail"}, "B");
    std::vector<Digit> head;
    for (const auto& v : j.at("elements")) head.push_back(json_digit(v, "B.elements"));
    if (j.contains("tail")) return with_tail(std::move(head), from_json(j["tail"]));
    return finite(std::move(head));
  }
  throw Error(ErrorCode::kParse, "unknown digit set kind '" + kind + "'");
}

std::string DigitSet::describe() const { return to_json().dump(); }

// GrowthFunction

Digit GrowthFunction::Rule::eval(std::uint64_t n) const {
  const long double x = static_cast<long double>(n);
  const long double v = exponential ? c * std::pow(e, x) : c * std::pow(x, e);
  if (!(v < 1.8e19L)) return std::numeric_limits<Digit>::max();
  return static_cast<Digit>(std::ceil(v));
}

GrowthFunction::GrowthFunction(Rule tail, std::vector<Digit> table)
    : tail_(tail), table_(std::move(table)) {
  std::uint64_t n = table_.size() + 1;
  while (n > 1 && (*this)(n - 1) <= (*this)(n)) --n;
  monotone_from_ = n;
}

GrowthFunction GrowthFunction::power(long double c, long double p) {
  if (!(c > 0) || !(p > 0)) throw Error(ErrorCode::kInvalidArgument, "power growth needs c > 0, p > 0");
  return GrowthFunction(Rule{false, c, p}, {});
}

GrowthFunction GrowthFunction::exponential(long double c, long double r) {
  if (!(c > 0) || !(r > 1)) throw Error(ErrorCode::kInvalidArgument, "exponential growth needs c > 0, r > 1");
  return GrowthFunction(Rule{true, c, r}, {});
}

GrowthFunction GrowthFunction::table(std::vector<Digit> values, GrowthFunction tail) {
  if (!tail.table_.empty()) throw Error(ErrorCode::kInvalidArgument, "table tail must be a power or exponential rule");
  return GrowthFunction(tail.tail_, std::move(values));
}

Digit GrowthFunction::operator()(std::uint64_t n) const {
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "growth functions are indexed from 1");
  if (n <= table_.size()) return table_[n - 1];
  return tail_.eval(n);
}

std::uint64_t GrowthFunction::first_index_at_least(Digit b, std::uint64_t scan_limit) const {
  const std::uint64_t start = monotone_from_;
  std::uint64_t hit = start;
  if ((*this)(start) < b) {
    // f(lo) < b <= f(hi)
    std::uint64_t lo = start;
    std::uint64_t step = 1;
    std::uint64_t hi = start + step;
    while ((*this)(hi) < b) {
      if (hi > scan_limit) {
        throw Error(ErrorCode::kHorizonTooSmall,
                    "growth function stays below " + std::to_string(b) + " up to n = " + std::to_string(scan_limit),
                    scan_limit);
      }
      lo = hi;
      step *= 2;
      hi = start + step;
    }
    while (hi - lo > 1) {
      const std::uint64_t mid = lo + (hi - lo) / 2;
      if ((*this)(mid) < b) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    hit = hi;
  }
  while (hit > 1 && (*this)(hit - 1) >= b) --hit;
  return hit;
}

nlohmann::json GrowthFunction::to_json() const {
  nlohmann::json rule = tail_.exponential
                            ? nlohmann::json{{"kind", "exponential"}, {"c", static_cast<double>(tail_.c)},
                                             {"r", static_cast<double>(tail_.e)}}
                            : nlohmann::json{{"kind", "power"}, {"c", static_cast<double>(tail_.c)},
                                             {"p", static_cast<double>(tail_.e)}};
  if (table_.empty()) return rule;
  return nlohmann::json{{"kind", "table"}, {"values", table_}, {"tail", rule}};
}

GrowthFunction GrowthFunction::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    throw Error(ErrorCode::kParse, "f must be an object with a string 'kind'");
  }
  const std::string kind = j["kind"];
  auto num = [&](const char* key, double fallback) {
    if (!j.contains(key)) return static_cast<long double>(fallback);
    if (!j[key].is_number()) throw Error(ErrorCode::kParse, std::string("f.") + key + " must be a number");
    return static_cast<long double>(j[key].get<double>());
  };
  if (kind == "power") {
    require_keys(j, {"kind", "c", "p"}, "f");
    return power(num("c", 1), num("p", 1));
  }
  if (kind == "exponential") {
    require_keys(j, {"kind", "c", "r"}, "f");
    return exponential(num("c", 1), num("r", 2));
  }
  if (kind == "table") {
    require_keys(j, {"kind", "values", "tail"}, "f");
    std::vector<Digit> values;
    for (const auto& v : j.at("values")) values.push_back(json_digit(v, "f.values"));
    return table(std::move(values), from_json(j.at("tail")));
  }
  throw Error(ErrorCode::kParse, "unknown growth function kind '" + kind + "'");
}

std::string GrowthFunction::describe() const { return to_json().dump(); }

// tau

const char* to_string(TauMethod m) {
  return m == TauMethod::kClosedForm ? "closed-form" : "partial-sum-with-tail-bound";
}

TauEstimate tau_numeric(const DigitSet& b, long double tolerance) {
  TauEstimate t;
  t.method = TauMethod::kPartialSumTailBound;
  if (b.is_finite()) {
    t.lower = t.upper = 0;
    return t;
  }
  // B is a subset of N, so the series converges for every s > 1.
  long double lo = 0;
  long double hi = 1;
  const Integer from(b.min());
  while (hi - lo > tolerance) {
    const long double mid = (lo + hi) / 2;
    const SeriesBracket sum = b.tail_sum(mid, from);
    if (std::isfinite(sum.hi)) {
      hi = mid;
    } else if (std::isinf(sum.lo)) {
      lo = mid;
    } else {
      t.warning = "tail bound cannot decide convergence at s = " + format_real(mid, 6) + "; bracket is one-sided";
      break;
    }
  }
  t.lower = lo;
  t.upper = hi;
  return t;
}

TauEstimate tau(const DigitSet& b, long double tolerance) {
  if (auto exact = b.tau_closed_form()) {
    TauEstimate t;
    t.exact = *exact;
    t.lower = t.upper = to_long_double(*exact);
    return t;
  }
  return tau_numeric(b, tolerance);
}

}  // namespace srcf
