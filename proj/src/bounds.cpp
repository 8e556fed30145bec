#include "srcf/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "srcf/error.hpp"
#include "srcf/pressure.hpp"

namespace srcf {

namespace {

constexpr long double kConditionMargin = 1e-12L;

long double log_sum_power(const std::vector<Digit>& digits, long double e) {
  const long double ref = std::log(static_cast<long double>(digits.front()));
  CompensatedSum sum;
  for (Digit k : digits) sum.add(std::exp(-e * (std::log(static_cast<long double>(k)) - ref)));
  return -e * ref + std::log(sum.value());
}

struct Chain {
  const NonAutonomousIFS& system;
  long double s;
  long double delta;
  long double log_c0;
  std::uint64_t t_n;
  std::map<std::pair<std::size_t, bool>, long double> cache;

  long double level_term(std::size_t alphabet, bool early) {
    const auto key = std::make_pair(alphabet, early);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    const std::vector<Digit>& a = system.alphabets()[alphabet];
    const long double v = early ? -s * log_c0 + log_sum_power(a, 2 * s) : log_sum_power(a, (2 + delta) * s);
    return cache.emplace(key, v).first->second;
  }

  long double at(std::uint64_t n) {
    CompensatedSum total;
    for (const LevelSegment& seg : system.segments()) {
      if (seg.first > n) break;
      const bool early = seg.last <= t_n;
      const std::uint64_t last = std::min(seg.last, n);
      const std::uint64_t plus = system.sigma().count_plus(seg.first, last);
      const std::uint64_t minus = last - seg.first + 1 - plus;
      if (plus) total.add(static_cast<long double>(plus) * level_term(seg.alphabet_plus, early));
      if (minus) total.add(static_cast<long double>(minus) * level_term(seg.alphabet_minus, early));
    }
    return total.value();
  }
};

long double tau_upper(const DigitSet& b) {
  const TauEstimate t = tau(b);
  return t.exact ? to_long_double(*t.exact) : t.upper;
}

// log of (2C)^{e/2} times the tail upper bound at l, with C for digits >= c_digit.
long double log_condition(const DigitSet& b, long double e, const Integer& l, const Integer& c_digit) {
  const DistortionConstant c = distortion_constant(c_digit);
  const long double tail = b.tail_sum(e, l).hi;
  if (tail == 0) return -std::numeric_limits<long double>::infinity();
  return e / 2 * (std::log(2.0L) + to_long_double(c.log_value)) + std::log(tail);
}

// Least L >= 3 passing `ok`, which must be monotone in L.
template <class Pred>
Integer least_l(Pred ok) {
  Integer hi(3);
  const Integer limit = Integer(1) << 2048;
  while (!ok(hi)) {
    hi *= 2;
    if (hi > limit) throw Error(ErrorCode::kLSearchExhausted, "no L below 2^2048 satisfies the tail condition");
  }
  if (hi > 3) {
    Integer lo = hi / 2;  // failed on the way up
    while (hi - lo > 1) {
      const Integer mid = (lo + hi) / 2;
      (ok(mid) ? hi : lo) = mid;
    }
  }
  return hi;
}

}  // namespace

nlohmann::json LowerCertificate::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const DepthCheck& d : depths) {
    rows.push_back({{"n", d.n},
                    {"log_Z_low", format_real(d.z_low, 15)},
                    {"chain", format_real(d.chain, 15)},
                    {"pass", d.pass},
                    {"literal_floor_pass", d.literal_pass}});
  }
  nlohmann::json j{{"epsilon", format_real(epsilon, 12)},
                   {"delta", format_real(delta, 12)},
                   {"tau", format_real(tau, 15)},
                   {"s", format_real(s, 15)},
                   {"min_B", min_b},
                   {"t_1", t1},
                   {"constants", constants.to_json()},
                   {"gamma", to_string(system->validation().gamma)},
                   {"L", system->validation().l},
                   {"log_floor", format_real(log_floor, 15)},
                   {"log_floor_literal", format_real(log_floor_literal, 15)},
                   {"literal_floor_failures", literal_failures},
                   {"depths", rows},
                   {"certified", certified},
                   {"applies_to", applies_to},
                   {"scheme", scheme->to_json()},
                   {"system", system->to_json()}};
  j["conclusion"] = certified ? "s(Phi) >= " + format_real(s, 15) : "not certified";
  if (first_failure) j["first_failure"] = *first_failure;
  return j;
}

LowerCertificate lower_certificate(const DigitSet& b, const GrowthFunction& f, const SignSequence& sigma,
                                   long double epsilon, long double delta, const LowerOptions& options) {
  if (!(delta > 0)) throw Error(ErrorCode::kInvalidArgument, "delta must be positive");
  LowerCertificate cert;
  cert.epsilon = epsilon;
  cert.delta = delta;
  for (std::size_t horizon = options.horizon;; horizon += 2) {
    cert.scheme = std::make_shared<const BlockScheme>(build_blocks(b, f, epsilon, horizon));
    cert.system = std::make_shared<const NonAutonomousIFS>(assemble(sigma, cert.scheme, options.policy));
    try {
      cert.constants = control_constants(*cert.system, delta);
      break;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kHorizonTooSmall || horizon + 2 > options.max_horizon) throw;
    }
  }
  const BlockScheme& scheme = *cert.scheme;
  const NonAutonomousIFS& system = *cert.system;
  cert.tau = scheme.tau().exact ? to_long_double(*scheme.tau().exact) : scheme.tau().lower;
  cert.s = scheme.exponent() / (2 + delta);
  cert.min_b = scheme.b(1);
  cert.t1 = scheme.t(1);

  const std::size_t n_const = cert.constants.n;
  const std::uint64_t t_n = scheme.window_end(n_const);
  const long double log_c0 = log_abs(cert.constants.c_window);
  Chain chain{system, cert.s, delta, log_c0, t_n, {}};
  cert.log_floor = chain.at(t_n);
  {
    CompensatedSum lit;
    lit.add(-static_cast<long double>(n_const) * cert.s * log_c0);
    lit.add(-2 * cert.s * static_cast<long double>(cert.t1) * std::log(static_cast<long double>(cert.min_b)));
    for (std::size_t m = 2; m <= n_const; ++m) {
      lit.add(static_cast<long double>(scheme.t(m)) * log_sum_power(scheme.block(m), 2 * cert.s));
    }
    cert.log_floor_literal = lit.value();
  }

  std::vector<std::uint64_t> depths = options.depths;
  if (depths.empty()) {
    depths.push_back(t_n);
    for (std::size_t m = n_const + 1; m <= scheme.horizon(); ++m) {
      depths.push_back((scheme.window_end(m - 1) + scheme.window_end(m)) / 2);
      depths.push_back(scheme.window_end(m));
    }
  }
  std::sort(depths.begin(), depths.end());
  depths.erase(std::unique(depths.begin(), depths.end()), depths.end());
  if (depths.front() < t_n) {
    throw Error(ErrorCode::kInvalidArgument, "scheduled depths must be at least T_N = " + std::to_string(t_n));
  }

  const std::vector<PressureBracket> z = partition_profile(system, cert.s, depths, PartitionMode::kFactorized);
  const long double tol = options.relative_tolerance;
  bool all = true;
  for (const PressureBracket& pb : z) {
    DepthCheck d;
    d.n = pb.n;
    d.z_low = pb.z_low;
    d.chain = chain.at(pb.n);
    const long double slack_z = tol * std::max(std::abs(d.z_low), std::abs(d.chain));
    const long double slack_f = tol * std::max(std::abs(d.chain), std::abs(cert.log_floor));
    d.pass = d.z_low + slack_z >= d.chain && d.chain + slack_f >= cert.log_floor;
    d.literal_pass = d.z_low >= cert.log_floor_literal;
    if (!d.literal_pass) ++cert.literal_failures;
    if (!d.pass && all) cert.first_failure = d.n;
    all = all && d.pass;
    cert.depths.push_back(d);
  }
  const Validation& v = system.validation();
  const bool subexp = std::all_of(v.subexp.begin(), v.subexp.end(), [](const SubexpEntry& e) { return e.pass; });
  cert.certified = all && v.open_set && subexp;
  cert.applies_to = v.containment_exception_count == 0 ? "G_sigma(B, f) and E_sigma(B)" : "E_sigma(B)";
  return cert;
}

nlohmann::json UpperCertificate::to_json() const {
  nlohmann::json covers_j = nlohmann::json::array();
  for (const CoverAudit& c : covers) {
    covers_j.push_back({{"depth", c.depth},
                        {"words", c.words},
                        {"sum", format_real(c.sum, 15)},
                        {"at_most_one", c.at_most_one},
                        {"nonincreasing", c.nonincreasing}});
  }
  nlohmann::json alphabet = nlohmann::json::array();
  for (const Integer& a : audit_alphabet) alphabet.push_back(to_string(a));
  return {{"epsilon", format_real(epsilon, 12)},
          {"tau", format_real(tau, 15)},
          {"bound", format_real(bound, 15)},
          {"L", to_string(l)},
          {"C", {{"min_digit", to_string(l)},
                 {"log_C", format_real(to_long_double(c.log_value), 15)},
                 {"c0", to_string(c.c0)}}},
          {"log_condition_at_L", format_real(log_condition, 12)},
          {"log_condition_at_L_minus_1", format_real(log_condition_below, 12)},
          {"L_self_consistent", to_string(l_self_consistent)},
          {"audit_alphabet", alphabet},
          {"covers", covers_j},
          {"worst_ratio_log_margin", format_real(worst_ratio_margin, 12)},
          {"ratio_pass", ratio_pass},
          {"certified", certified},
          {"conclusion", certified ? "dim_H E_sigma(B) <= " + format_real(bound, 15) : "not certified"},
          {"note", "excluded digits below L handled by bi-Lipschitz invariance (cited, not computed)"}};
}

UpperCertificate upper_certificate(const DigitSet& b, const SignSequence& sigma, long double epsilon,
                                   const UpperOptions& options) {
  if (!(epsilon > 0)) throw Error(ErrorCode::kEpsilonOutOfRange, "epsilon must be positive");
  UpperCertificate cert;
  cert.epsilon = epsilon;
  cert.tau = tau_upper(b);
  cert.exponent = cert.tau + epsilon;
  cert.bound = cert.exponent / 2;
  const long double e = cert.exponent;

  const auto checked = [&](long double g) {
    if (std::isnan(g)) throw Error(ErrorCode::kNoTailBound, "no usable tail bound for " + b.describe());
    return g <= -kConditionMargin;
  };
  // L from C(3), then C recomputed for digits >= L and the condition re-checked
  cert.l = least_l([&](const Integer& l) { return checked(log_condition(b, e, l, Integer(3))); });
  cert.c = distortion_constant(cert.l);
  cert.log_condition = log_condition(b, e, cert.l, cert.l);
  cert.log_condition_below = cert.l > 3 ? log_condition(b, e, cert.l - 1, Integer(3)) : 0;
  cert.l_self_consistent = least_l([&](const Integer& l) { return checked(log_condition(b, e, l, l)); });

  // audit on words over the first few elements >= L
  cert.audit_alphabet = b.elements_from(cert.l, options.audit_width);
  const std::size_t width = cert.audit_alphabet.size();
  const std::size_t depth = options.audit_depth;
  if (width == 0 || depth == 0) throw Error(ErrorCode::kInvalidArgument, "empty audit alphabet");
  const long double log_c = to_long_double(cert.c.log_value);
  std::vector<long double> log_a;
  for (const Integer& a : cert.audit_alphabet) log_a.push_back(log_abs(a));

  struct Partial {
    std::vector<CompensatedSum> sums;
    std::vector<std::uint64_t> words;
    long double worst = -std::numeric_limits<long double>::infinity();
  };
  std::vector<Partial> parts(width);
  parallel_for(width, options.exec.threads, [&](std::size_t first) {
    Partial& p = parts[first];
    p.sums.resize(depth);
    p.words.assign(depth, 0);
    struct Frame {
      MobiusMap map;
      Rational length;
    };
    std::vector<Frame> stack;
    const auto push = [&](std::size_t k) {
      const std::size_t level = stack.size();  // 0-based
      const Sign sg = sigma[level + 1];
      const MobiusMap m = (level ? stack.back().map : MobiusMap()) * generator(sg, cert.audit_alphabet[k]);
      const Rational len = fundamental_length(m);
      const Rational ratio = level ? len / stack.back().length : len;
      const long double factor = sg == Sign::kPlus ? 0 : std::log(2.0L);
      p.worst = std::max(p.worst, log_abs(ratio) + 2 * log_a[k] - factor - log_c);
      p.sums[level].add(std::exp(e / 2 * log_abs(len)));
      ++p.words[level];
      stack.push_back({m, len});
    };
    // iterative DFS over idx
    push(first);
    std::vector<std::size_t> next{0};
    while (!stack.empty()) {
      if (stack.size() < depth && next.back() < width) {
        const std::size_t k = next.back()++;
        push(k);
        next.push_back(0);
      } else {
        stack.pop_back();
        next.pop_back();
      }
    }
  });
  cert.worst_ratio_margin = -std::numeric_limits<long double>::infinity();
  long double prev = 1;
  for (std::size_t level = 0; level < depth; ++level) {
    std::vector<CompensatedSum> column;
    CoverAudit audit;
    audit.depth = level + 1;
    for (const Partial& p : parts) {
      column.push_back(p.sums[level]);
      audit.words += p.words[level];
    }
    audit.sum = pairwise_sum(column).value();
    audit.at_most_one = audit.sum <= 1;
    audit.nonincreasing = audit.sum <= prev;
    prev = audit.sum;
    cert.covers.push_back(audit);
  }
  for (const Partial& p : parts) cert.worst_ratio_margin = std::max(cert.worst_ratio_margin, p.worst);
  cert.ratio_pass = cert.worst_ratio_margin <= 1e-15L;
  cert.certified = cert.log_condition <= 0 && cert.ratio_pass &&
                   std::all_of(cert.covers.begin(), cert.covers.end(),
                               [](const CoverAudit& c) { return c.at_most_one && c.nonincreasing; });
  return cert;
}

nlohmann::json DimensionReport::to_json() const {
  nlohmann::json rows_j = nlohmann::json::array();
  for (const DimensionRow& r : rows) {
    nlohmann::json j{{"epsilon", format_real(r.epsilon, 12)}, {"delta", format_real(r.delta, 12)}};
    if (r.lower) {
      j["lower"] = {{"s", format_real(r.lower->s, 15)},
                    {"certified", r.lower->certified},
                    {"N", r.lower->constants.n},
                    {"C_0", to_string(r.lower->constants.c_window)},
                    {"L_A4", r.lower->system->validation().l},
                    {"applies_to", r.lower->applies_to}};
    } else {
      j["lower"] = {{"note", r.lower_note}};
    }
    if (r.upper) {
      j["upper"] = {{"bound", format_real(r.upper->bound, 15)},
                    {"certified", r.upper->certified},
                    {"L", to_string(r.upper->l)}};
    } else {
      j["upper"] = {{"note", r.upper_note}};
    }
    rows_j.push_back(j);
  }
  return {{"target", format_real(target, 15)},
          {"dimension", format_bracket(best_lower, best_upper, 15)},
          {"within_tolerance", within_tolerance},
          {"rows", rows_j},
          {"narrative", narrative}};
}

std::string DimensionReport::csv() const {
  std::ostringstream out;
  out << "kind,epsilon,delta,value,parameter,verdict\n";
  for (const DimensionRow& r : rows) {
    if (r.lower) {
      out << "lower," << format_real(r.epsilon, 6) << ',' << format_real(r.delta, 6) << ','
          << format_real(r.lower->s, 12) << ",N=" << r.lower->constants.n << ','
          << (r.lower->certified ? "certified" : "failed") << '\n';
    }
    if (r.upper) {
      out << "upper," << format_real(r.epsilon, 6) << ",," << format_real(r.upper->bound, 12) << ",L="
          << to_string(r.upper->l) << ',' << (r.upper->certified ? "certified" : "failed") << '\n';
    }
  }
  return out.str();
}

DimensionReport dimension_report(const DigitSet& b, const GrowthFunction& f, const SignSequence& sigma,
                                 const ReportOptions& options) {
  DimensionReport rep;
  const TauEstimate t = tau(b);
  const long double tau_lo = t.exact ? to_long_double(*t.exact) : t.lower;
  const long double tau_hi = t.exact ? tau_lo : t.upper;
  rep.target = (tau_lo + tau_hi) / 4;
  rep.best_lower = 0;
  rep.best_upper = 1;
  for (std::size_t i = 0; i < options.epsilons.size(); ++i) {
    DimensionRow row;
    row.epsilon = options.epsilons[i];
    row.delta = i < options.deltas.size() ? options.deltas[i] : row.epsilon;
    if (row.epsilon < tau_lo) {
      try {
        row.lower = lower_certificate(b, f, sigma, row.epsilon, row.delta, options.lower);
        if (row.lower->certified) rep.best_lower = std::max(rep.best_lower, row.lower->s);
      } catch (const Error& e) {
        row.lower_note = std::string(to_string(e.code())) + ": " + e.what();
      }
    } else {
      row.lower_note = "epsilon >= tau(B); only the trivial bound 0 applies";
    }
    try {
      row.upper = upper_certificate(b, sigma, row.epsilon, options.upper);
      if (row.upper->certified) rep.best_upper = std::min(rep.best_upper, row.upper->bound);
    } catch (const Error& e) {
      row.upper_note = std::string(to_string(e.code())) + ": " + e.what();
    }
    rep.rows.push_back(std::move(row));
    rep.within_tolerance = rep.target - rep.best_lower <= options.tolerance &&
                           rep.best_upper - rep.target <= options.tolerance;
    if (rep.within_tolerance) break;
  }
  std::ostringstream n;
  n << "lower bounds are Bowen dimensions of scheme-built limit sets inside the digit-restricted set"
    << " (G_sigma(B, f) unless a row says E_sigma(B)); upper bounds cover E_sigma(B) via digits >= L."
    << " Target tau(B)/2 = " << format_real(rep.target, 12) << '.';
  rep.narrative = n.str();
  return rep;
}

}  // namespace srcf
