#include "srcf/sign_sequence.hpp"

#include <algorithm>

#include "srcf/error.hpp"

namespace srcf {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::vector<int> to_ints(const std::vector<Sign>& v) {
  std::vector<int> out;
  out.reserve(v.size());
  for (Sign s : v) out.push_back(value(s));
  return out;
}

std::vector<Sign> signs_from_json(const nlohmann::json& j, const char* field) {
  if (!j.is_array()) throw Error(ErrorCode::kParse, std::string("sigma.") + field + " must be an array");
  std::vector<Sign> out;
  for (const auto& e : j) {
    if (!e.is_number_integer()) throw Error(ErrorCode::kParse, std::string("sigma.") + field + " entries must be +1/-1");
    out.push_back(sign_from_int(e.get<long>()));
  }
  return out;
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return it.key() == k; })) {
      throw Error(ErrorCode::kParse, "unknown field sigma." + it.key());
    }
  }
}

}  // namespace

SignSequence SignSequence::constant(Sign s) { return SignSequence(Constant{s}); }

SignSequence SignSequence::periodic(std::vector<Sign> pattern, std::vector<Sign> preperiod) {
  if (pattern.empty()) throw Error(ErrorCode::kInvalidArgument, "periodic sign pattern is empty");
  return SignSequence(Periodic{std::move(pattern), std::move(preperiod)});
}

SignSequence SignSequence::explicit_prefix(std::vector<Sign> prefix, Sign tail) {
  return SignSequence(Prefix{std::move(prefix), tail});
}

SignSequence SignSequence::seeded_random(double p_plus, std::uint64_t seed) {
  if (!(p_plus >= 0.0 && p_plus <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "probability of +1 must lie in [0, 1]");
  }
  return SignSequence(Random{p_plus, seed});
}

Sign SignSequence::operator[](std::uint64_t n) const {
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "sign sequences are indexed from 1");
  return std::visit(
      Overloaded{
          [](const Constant& c) { return c.sign; },
          [n](const Periodic& p) {
            if (n <= p.preperiod.size()) return p.preperiod[n - 1];
            return p.pattern[(n - 1 - p.preperiod.size()) % p.pattern.size()];
          },
          [n](const Prefix& p) { return n <= p.prefix.size() ? p.prefix[n - 1] : p.tail; },
          [n](const Random& r) {
            const std::uint64_t h = splitmix64(r.seed ^ splitmix64(n));
            // 53-bit uniform in [0, 1)
            const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
            return u < r.p_plus ? Sign::kPlus : Sign::kMinus;
          },
      },
      kind_);
}

std::vector<Sign> SignSequence::prefix(std::uint64_t n) const {
  std::vector<Sign> out;
  out.reserve(n);
  for (std::uint64_t k = 1; k <= n; ++k) out.push_back((*this)[k]);
  return out;
}

std::uint64_t SignSequence::count_plus(std::uint64_t first, std::uint64_t last) const {
  if (first == 0) throw Error(ErrorCode::kInvalidArgument, "sign sequences are indexed from 1");
  if (last < first) return 0;
  const std::uint64_t span = last - first + 1;
  if (const auto* c = std::get_if<Constant>(&kind_)) return c->sign == Sign::kPlus ? span : 0;
  if (const auto* p = std::get_if<Periodic>(&kind_)) {
    // plus-count over 1..n, in closed form
    auto upto = [p](std::uint64_t n) -> std::uint64_t {
      const std::uint64_t pre = p->preperiod.size();
      std::uint64_t total = 0;
      for (std::uint64_t k = 0; k < std::min(n, pre); ++k) total += p->preperiod[k] == Sign::kPlus;
      if (n <= pre) return total;
      const std::uint64_t rest = n - pre;
      const std::uint64_t len = p->pattern.size();
      const auto per_period = static_cast<std::uint64_t>(
          std::count(p->pattern.begin(), p->pattern.end(), Sign::kPlus));
      total += (rest / len) * per_period;
      for (std::uint64_t k = 0; k < rest % len; ++k) total += p->pattern[k] == Sign::kPlus;
      return total;
    };
    return upto(last) - upto(first - 1);
  }
  if (const auto* p = std::get_if<Prefix>(&kind_)) {
    std::uint64_t total = 0;
    const std::uint64_t pre = p->prefix.size();
    for (std::uint64_t k = first; k <= std::min(last, pre); ++k) total += p->prefix[k - 1] == Sign::kPlus;
    if (last > pre && p->tail == Sign::kPlus) total += last - std::max(first, pre + 1) + 1;
    return total;
  }
  std::uint64_t total = 0;
  for (std::uint64_t k = first; k <= last; ++k) total += (*this)[k] == Sign::kPlus;
  return total;
}

bool SignSequence::is_constant() const {
  return std::visit(Overloaded{
                        [](const Constant&) { return true; },
                        [](const Periodic& p) {
                          auto all_eq = [](const std::vector<Sign>& v, Sign s) {
                            return std::all_of(v.begin(), v.end(), [s](Sign x) { return x == s; });
                          };
                          return all_eq(p.pattern, p.pattern[0]) && all_eq(p.preperiod, p.pattern[0]);
                        },
                        [](const Prefix& p) {
                          return std::all_of(p.prefix.begin(), p.prefix.end(),
                                             [&](Sign x) { return x == p.tail; });
                        },
                        [](const Random& r) { return r.p_plus == 0.0 || r.p_plus == 1.0; },
                    },
                    kind_);
}

bool SignSequence::all_plus() const { return is_constant() && (*this)[1] == Sign::kPlus; }

nlohmann::json SignSequence::to_json() const {
  return std::visit(
      Overloaded{
          [](const Constant& c) { return nlohmann::json{{"kind", "constant"}, {"value", value(c.sign)}}; },
          [](const Periodic& p) {
            return nlohmann::json{{"kind", "periodic"},
                                  {"pattern", to_ints(p.pattern)},
                                  {"preperiod", to_ints(p.preperiod)}};
          },
          [](const Prefix& p) {
            return nlohmann::json{{"kind", "explicit"}, {"prefix", to_ints(p.prefix)}, {"tail", value(p.tail)}};
          },
          [](const Random& r) {
            return nlohmann::json{{"kind", "random"}, {"p_plus", r.p_plus}, {"seed", r.seed}};
          },
      },
      kind_);
}

SignSequence SignSequence::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    throw Error(ErrorCode::kParse, "sigma must be an object with a string 'kind'");
  }
  const std::string kind = j["kind"];
  if (kind == "constant") {
    require_keys(j, {"kind", "value"});
    return constant(sign_from_int(j.at("value").get<long>()));
  }
  if (kind == "periodic") {
    require_keys(j, {"kind", "pattern", "preperiod"});
    std::vector<Sign> pre;
    if (j.contains("preperiod")) pre = signs_from_json(j["preperiod"], "preperiod");
    return periodic(signs_from_json(j.at("pattern"), "pattern"), std::move(pre));
  }
  if (kind == "explicit") {
    require_keys(j, {"kind", "prefix", "tail"});
    return explicit_prefix(signs_from_json(j.at("prefix"), "prefix"), sign_from_int(j.at("tail").get<long>()));
  }
  if (kind == "random") {
    require_keys(j, {"kind", "p_plus", "seed"});
    return seeded_random(j.at("p_plus").get<double>(), j.at("seed").get<std::uint64_t>());
  }
  throw Error(ErrorCode::kParse, "unknown sigma kind '" + kind + "'");
}

std::string SignSequence::describe() const { return to_json().dump(); }

}  // namespace srcf
