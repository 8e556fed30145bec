#include "srcf/ifs.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <limits>
#include <random>

#include "srcf/error.hpp"

namespace srcf {

namespace {

constexpr std::size_t kExceptionSample = 32;

std::size_t intern(std::vector<std::vector<Digit>>& pool, std::map<std::vector<Digit>, std::size_t>& ids,
                   const std::vector<Digit>& a) {
  auto [it, inserted] = ids.emplace(a, pool.size());
  if (inserted) pool.push_back(a);
  return it->second;
}

// Last level in [first, last] whose sign is s; assumes one exists.
std::uint64_t last_with_sign(const SignSequence& sigma, std::uint64_t first, std::uint64_t last, Sign s) {
  for (std::uint64_t n = last; n >= first; --n) {
    if (sigma[n] == s) return n;
  }
  return first;
}

nlohmann::json alphabet_summary(const std::vector<Digit>& a) {
  nlohmann::json j{{"size", a.size()}, {"min", a.front()}, {"max", a.back()}};
  if (a.size() <= 16) j["digits"] = a;
  return j;
}

}  // namespace

Rational level_sup(Sign sign, Digit i) {
  const Integer d = sign == Sign::kPlus ? Integer(i) : Integer(i) - 1;
  return Rational(1, d * d);
}

Rational level_inf(Sign sign, Digit i) {
  const Integer d = sign == Sign::kPlus ? Integer(i) + 1 : Integer(i);
  return Rational(1, d * d);
}

Rational distortion_ratio(Sign sign, Digit i) { return level_sup(sign, i) / level_inf(sign, i); }

nlohmann::json Validation::to_json() const {
  nlohmann::json sub = nlohmann::json::array();
  for (const auto& e : subexp) {
    sub.push_back({{"block", e.block},
                   {"value", format_real(e.value, 12)},
                   {"bound", format_real(e.bound, 12)},
                   {"pass", e.pass}});
  }
  nlohmann::json exc = nlohmann::json::array();
  for (const auto& e : containment_exceptions) {
    exc.push_back({{"level", e.level}, {"digit", e.digit}, {"f", e.bound}});
  }
  nlohmann::json j{{"open_set", open_set},
                   {"open_set_detail", open_set_detail},
                   {"small_digit_levels", small_digit_levels},
                   {"gamma", to_string(gamma)},
                   {"contraction_from", contraction_from},
                   {"L", l},
                   {"subexp", sub},
                   {"containment_exception_count", containment_exception_count},
                   {"containment_exceptions", exc},
                   {"repaired_levels", repaired_levels}};
  if (last_small_digit_level) j["last_small_digit_level"] = *last_small_digit_level;
  return j;
}

const LevelSegment& NonAutonomousIFS::segment(std::uint64_t n) const {
  if (n == 0 || n > levels()) {
    throw Error(ErrorCode::kBeyondHorizon,
                "level " + std::to_string(n) + " outside 1.." + std::to_string(levels()), n);
  }
  auto it = std::lower_bound(segments_.begin(), segments_.end(), n,
                             [](const LevelSegment& s, std::uint64_t v) { return s.last < v; });
  return *it;
}

const std::vector<Digit>& NonAutonomousIFS::alphabet(std::uint64_t n) const {
  const LevelSegment& s = segment(n);
  return alphabets_[sigma_[n] == Sign::kPlus ? s.alphabet_plus : s.alphabet_minus];
}

bool NonAutonomousIFS::autonomous() const {
  if (!sigma_.is_constant()) return false;
  const bool plus = sigma_[1] == Sign::kPlus;
  const auto id = [plus](const LevelSegment& s) { return plus ? s.alphabet_plus : s.alphabet_minus; };
  return std::all_of(segments_.begin(), segments_.end(),
                     [&](const LevelSegment& s) { return alphabets_[id(s)] == alphabets_[id(segments_.front())]; });
}

long double NonAutonomousIFS::log_word_count(std::uint64_t n) const {
  long double total = 0;
  for (const LevelSegment& s : segments_) {
    if (s.first > n) break;
    const std::uint64_t last = std::min(s.last, n);
    const std::uint64_t plus = sigma_.count_plus(s.first, last);
    const std::uint64_t minus = last - s.first + 1 - plus;
    total += static_cast<long double>(plus) * std::log(static_cast<long double>(alphabets_[s.alphabet_plus].size()));
    total += static_cast<long double>(minus) * std::log(static_cast<long double>(alphabets_[s.alphabet_minus].size()));
  }
  return total;
}

void NonAutonomousIFS::validate() {
  Validation& v = validation_;
  v.open_set = true;
  // (A1) for every (alphabet, sign) in use
  std::map<std::pair<std::size_t, int>, bool> checked;
  std::uint64_t last_bad = 0;
  for (const LevelSegment& s : segments_) {
    const std::uint64_t len = s.last - s.first + 1;
    const std::uint64_t plus = sigma_.count_plus(s.first, s.last);
    for (Sign sg : {Sign::kPlus, Sign::kMinus}) {
      const std::uint64_t count = sg == Sign::kPlus ? plus : len - plus;
      if (count == 0) continue;
      const std::vector<Digit>& a = alphabets_[sg == Sign::kPlus ? s.alphabet_plus : s.alphabet_minus];
      const auto key = std::make_pair(sg == Sign::kPlus ? s.alphabet_plus : s.alphabet_minus, value(sg));
      if (!checked.count(key)) {
        checked[key] = true;
        for (std::size_t i = 1; i < a.size(); ++i) {
          const RationalInterval x = fundamental_interval(generator(sg, a[i - 1]));
          const RationalInterval y = fundamental_interval(generator(sg, a[i]));
          if (!x.interior_disjoint(y)) {
            v.open_set = false;
            v.open_set_detail = "digits " + std::to_string(a[i - 1]) + " and " + std::to_string(a[i]) + " overlap";
          }
        }
      }
      if (a.front() < 3) {
        v.small_digit_levels += count;
        const std::uint64_t last = last_with_sign(sigma_, s.first, s.last, sg);
        v.last_small_digit_level = std::max(v.last_small_digit_level.value_or(0), last);
      }
      if (level_sup(sg, a.front()) > Rational(1, 4)) {
        last_bad = std::max(last_bad, last_with_sign(sigma_, s.first, s.last, sg));
      }
    }
  }
  if (v.open_set) v.open_set_detail = "adjacent generator images meet only at endpoints";
  // Per-level sups never exceed 1 and are <= 1/4 from contraction_from on, so a run n..k has
  // norm <= 4^{-(k - contraction_from + 1)} <= 2^{-(k-n+1)} once k - n >= 2 contraction_from - 3.
  v.contraction_from = last_bad + 1;
  v.l = v.contraction_from >= 2 ? std::max<std::uint64_t>(1, 2 * v.contraction_from - 3) : 1;

  if (scheme_) {
    for (std::size_t m = 1; m <= scheme_->horizon(); ++m) {
      const long double value = std::log(static_cast<long double>(scheme_->block_size(m))) /
                                static_cast<long double>(scheme_->window_end(m - 1) + 1);
      const long double bound = 1.0L / static_cast<long double>(m);
      v.subexp.push_back({m, value, bound, value <= bound});
    }
  }
}

NonAutonomousIFS assemble(const SignSequence& sigma, std::shared_ptr<const BlockScheme> scheme,
                          AdmissibilityPolicy policy) {
  if (!scheme) throw Error(ErrorCode::kInvalidArgument, "missing block scheme");
  NonAutonomousIFS sys;
  sys.sigma_ = sigma;
  sys.scheme_ = scheme;
  sys.policy_ = policy;
  std::map<std::vector<Digit>, std::size_t> ids;
  const BlockScheme& s = *scheme;
  for (std::size_t m = 1; m <= s.horizon(); ++m) {
    const std::vector<Digit> block = s.block(m);
    const std::size_t plus = intern(sys.alphabets_, ids, block);
    std::size_t minus = plus;
    const std::uint64_t first = s.window_end(m - 1) + 1;
    const std::uint64_t last = s.window_end(m);
    if (block.front() == 1 && sigma.count_plus(first, last) < last - first + 1) {
      std::uint64_t bad = first;
      while (sigma[bad] == Sign::kPlus) ++bad;
      if (policy == AdmissibilityPolicy::kReject || m != 1) {
        throw Error(ErrorCode::kInadmissible,
                    "InadmissibleDigitAtLevel: digit 1 with sign -1 at level " + std::to_string(bad), bad);
      }
      std::vector<Digit> repaired = block;
      const std::optional<Digit> r = s.set().next(Digit{2});
      if (!r) throw Error(ErrorCode::kInadmissible, "B has no element >= 2 to repair level " + std::to_string(bad), bad);
      repaired.front() = *r;
      std::sort(repaired.begin(), repaired.end());
      repaired.erase(std::unique(repaired.begin(), repaired.end()), repaired.end());
      minus = intern(sys.alphabets_, ids, repaired);
      Validation& v = sys.validation_;
      v.repaired_levels = last - first + 1 - sigma.count_plus(first, last);
      for (std::uint64_t n = first; n <= last; ++n) {
        if (sigma[n] == Sign::kMinus && *r > s.growth()(n)) {
          ++v.containment_exception_count;
          if (v.containment_exceptions.size() < kExceptionSample) {
            v.containment_exceptions.push_back({n, *r, s.growth()(n)});
          }
        }
      }
    }
    sys.segments_.push_back({first, last, plus, minus, m});
  }
  sys.validate();
  return sys;
}

NonAutonomousIFS assemble(const SignSequence& sigma, const std::vector<std::vector<Digit>>& levels) {
  if (levels.empty()) throw Error(ErrorCode::kInvalidArgument, "explicit system needs at least one level");
  NonAutonomousIFS sys;
  sys.sigma_ = sigma;
  std::map<std::vector<Digit>, std::size_t> ids;
  for (std::uint64_t n = 1; n <= levels.size(); ++n) {
    std::vector<Digit> a = levels[n - 1];
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    if (a.empty() || a.front() == 0) {
      throw Error(ErrorCode::kInvalidArgument, "level " + std::to_string(n) + " needs a nonempty set of positive digits", n);
    }
    if (a.front() == 1 && sigma[n] == Sign::kMinus) {
      throw Error(ErrorCode::kInadmissible,
                  "InadmissibleDigitAtLevel: digit 1 with sign -1 at level " + std::to_string(n), n);
    }
    const std::size_t id = intern(sys.alphabets_, ids, a);
    if (!sys.segments_.empty() && sys.segments_.back().alphabet_plus == id) {
      sys.segments_.back().last = n;
    } else {
      sys.segments_.push_back({n, n, id, id, 0});
    }
  }
  sys.validate();
  return sys;
}

NonAutonomousIFS autonomous_system(Sign sign, std::vector<Digit> alphabet, std::uint64_t levels) {
  if (levels == 0 || levels > 100'000'000) throw Error(ErrorCode::kInvalidArgument, "level count out of range");
  std::vector<std::vector<Digit>> all(levels, std::move(alphabet));
  return assemble(SignSequence::constant(sign), all);
}

nlohmann::json NonAutonomousIFS::to_json() const {
  nlohmann::json segs = nlohmann::json::array();
  for (const LevelSegment& s : segments_) {
    nlohmann::json j{{"first", s.first}, {"last", s.last}, {"alphabet", alphabet_summary(alphabets_[s.alphabet_plus])}};
    if (s.alphabet_minus != s.alphabet_plus) j["alphabet_sign_minus"] = alphabet_summary(alphabets_[s.alphabet_minus]);
    if (s.block) j["block"] = s.block;
    segs.push_back(j);
  }
  return nlohmann::json{{"sigma", sigma_.to_json()},
                        {"levels", levels()},
                        {"segments", segs},
                        {"policy", policy_ == AdmissibilityPolicy::kReject ? "reject" : "repair-first-window"},
                        {"validation", validation_.to_json()}};
}

nlohmann::json ControlConstants::to_json() const {
  nlohmann::json j{{"delta", format_real(delta, 12)},
                   {"C_global", to_string(c_global)},
                   {"log_threshold_digit", format_real(log_threshold_digit, 12)},
                   {"N", n},
                   {"C_window", to_string(c_window)}};
  j["N_global"] = n_global ? nlohmann::json(*n_global) : nlohmann::json(nullptr);
  return j;
}

ControlConstants control_constants(const NonAutonomousIFS& system, long double delta) {
  if (!(delta > 0)) throw Error(ErrorCode::kInvalidArgument, "delta must be positive");
  ControlConstants cc;
  cc.delta = delta;
  cc.c_global = 1;
  bool minus_used = false;
  const auto& sigma = system.sigma();
  for (const LevelSegment& s : system.segments()) {
    const std::uint64_t len = s.last - s.first + 1;
    const std::uint64_t plus = sigma.count_plus(s.first, s.last);
    if (plus > 0) cc.c_global = std::max(cc.c_global, distortion_ratio(Sign::kPlus, system.alphabets()[s.alphabet_plus].front()));
    if (plus < len) {
      minus_used = true;
      cc.c_global = std::max(cc.c_global, distortion_ratio(Sign::kMinus, system.alphabets()[s.alphabet_minus].front()));
    }
  }
  cc.log_threshold_digit = log_abs(cc.c_global) / delta;
  cc.c_window = cc.c_global;
  const BlockScheme* scheme = system.scheme();
  if (!scheme) return cc;

  const Sign worst = minus_used ? Sign::kMinus : Sign::kPlus;
  std::optional<std::size_t> found;
  for (std::size_t n = 1; n <= scheme->horizon(); ++n) {
    const Digit b = scheme->b(n + 1);
    if (!found && delta * std::log(static_cast<long double>(b)) >= log_abs(distortion_ratio(worst, b))) found = n;
    if (!cc.n_global && std::log(static_cast<long double>(b)) >= cc.log_threshold_digit) cc.n_global = n;
  }
  if (!found) {
    throw Error(ErrorCode::kHorizonTooSmall,
                "no block start within the horizon satisfies b^delta >= distortion ratio; raise the horizon",
                scheme->horizon());
  }
  cc.n = *found;
  cc.c_window = 1;
  for (const LevelSegment& s : system.segments()) {
    if (s.first > scheme->window_end(cc.n)) break;
    const std::uint64_t len = s.last - s.first + 1;
    const std::uint64_t plus = sigma.count_plus(s.first, s.last);
    if (plus > 0) cc.c_window = std::max(cc.c_window, distortion_ratio(Sign::kPlus, system.alphabets()[s.alphabet_plus].front()));
    if (plus < len) cc.c_window = std::max(cc.c_window, distortion_ratio(Sign::kMinus, system.alphabets()[s.alphabet_minus].front()));
  }
  return cc;
}

SampledAddress sample_address(const NonAutonomousIFS& system, std::uint64_t seed, std::uint64_t depth) {
  if (depth > system.levels()) {
    throw Error(ErrorCode::kBeyondHorizon, "sample depth exceeds the number of levels", depth);
  }
  std::mt19937_64 rng(seed);
  SampledAddress out;
  MobiusMap m;
  for (std::uint64_t n = 1; n <= depth; ++n) {
    const std::vector<Digit>& a = system.alphabet(n);
    const std::uint64_t size = a.size();
    // rejection keeps the index exactly uniform and the stream portable
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % size;
    std::uint64_t u;
    do {
      u = rng();
    } while (u >= limit);
    const Digit d = a[u % size];
    const Sign s = system.sign(n);
    out.signs.push_back(s);
    out.digits.push_back(d);
    m = compose(m, generator(s, d));
  }
  out.interval = fundamental_interval(m);
  return out;
}

}  // namespace srcf
