#include "srcf/block_scheme.hpp"

#include <algorithm>
#include <cmath>

#include "srcf/error.hpp"

namespace srcf {

namespace {

constexpr std::uint64_t kMaxSummedTerms = 200'000'000;
constexpr std::size_t kUncoveredSample = 32;

struct BlockSum {
  Digit next;  // b_{m+1}
  std::uint64_t size;
  long double sum;
};

// Streams B from b upward until the running sum of k^{-e} reaches 1.
BlockSum close_block(const DigitSet& set, Digit b, long double e, std::uint64_t& budget) {
  CompensatedSum sum;
  std::uint64_t size = 0;
  Digit lo = b;
  Digit width = 64;
  for (;;) {
    const Digit hi = lo > std::numeric_limits<Digit>::max() - width ? std::numeric_limits<Digit>::max() : lo + width;
    const std::vector<Digit> chunk = set.elements(lo, hi);
    for (std::size_t i = 0; i < chunk.size(); ++i) {
      sum.add(std::pow(static_cast<long double>(chunk[i]), -e));
      ++size;
      if (budget-- == 0) {
        throw Error(ErrorCode::kSchemeBuildFailure, "block starting at " + std::to_string(b) +
                                                        " needs more terms than the summation budget");
      }
      if (sum.value() >= 1) {
        const std::optional<Digit> next =
            i + 1 < chunk.size() ? std::optional<Digit>(chunk[i + 1]) : set.next(chunk[i] + 1);
        if (!next) {
          throw Error(ErrorCode::kSchemeBuildFailure, "digit set ends (or leaves 64-bit range) after " +
                                                          std::to_string(chunk[i]));
        }
        return {*next, size, sum.value()};
      }
    }
    if (hi == std::numeric_limits<Digit>::max()) {
      throw Error(ErrorCode::kSchemeBuildFailure,
                  "block starting at " + std::to_string(b) + " never reaches sum 1 in 64-bit range");
    }
    lo = hi;
    width = width > (std::uint64_t{1} << 40) ? width : width * 2;
  }
}

std::uint64_t ceil_nonneg(long double x) { return x <= 0 ? 0 : static_cast<std::uint64_t>(std::ceil(x)); }

long double log_size(std::uint64_t n) { return std::log(static_cast<long double>(n)); }

// min of f over [first, last].
Digit window_min(const GrowthFunction& f, std::uint64_t first, std::uint64_t last) {
  const std::uint64_t mono = f.monotone_from();
  Digit best = f(std::max(first, std::min(last, mono)));
  for (std::uint64_t n = first; n <= last && n < mono; ++n) best = std::min(best, f(n));
  return best;
}

}  // namespace

std::vector<Digit> BlockScheme::block(std::size_t m) const {
  if (m == 1) return {b_.front()};
  return set_.elements(b(m), b(m + 1));
}

Digit BlockScheme::block_max(std::size_t m) const {
  if (m == 1) return b_.front();
  // largest element below b_{m+1}
  const std::vector<Digit> tail = set_.elements(b(m), b(m + 1));
  return tail.back();
}

BlockScheme build_blocks(const DigitSet& set, const GrowthFunction& f, long double epsilon,
                         std::size_t horizon) {
  if (horizon == 0) throw Error(ErrorCode::kInvalidArgument, "block horizon must be >= 1");
  BlockScheme s(set, f);
  s.tau_ = tau(set);
  if (!(epsilon > 0 && epsilon < s.tau_.lower)) {
    throw Error(ErrorCode::kEpsilonOutOfRange,
                "epsilon " + format_real(epsilon, 6) + " must lie in (0, tau(B)) with tau(B) >= " +
                    format_real(s.tau_.lower, 6));
  }
  s.epsilon_ = epsilon;
  s.exponent_ = s.tau_.lower - epsilon;

  // b_1 .. b_{M+2} and the sizes/sums of blocks 1 .. M+1
  std::uint64_t budget = kMaxSummedTerms;
  s.b_.push_back(set.min());
  for (std::size_t m = 1; m <= horizon + 1; ++m) {
    const BlockSum bs = close_block(set, s.b_.back(), s.exponent_, budget);
    s.b_.push_back(bs.next);
    if (m == 1) {
      s.sizes_.push_back(1);
      s.sums_.push_back(std::pow(static_cast<long double>(s.b_.front()), -s.exponent_));
    } else {
      s.sizes_.push_back(bs.size);
      s.sums_.push_back(bs.sum);
    }
  }

  const Digit b1 = s.b_[0];
  if (s.b_[1] > b1 + 1) {
    s.uncovered_count_ = set.count(b1 + 1, s.b_[1]);
    for (auto k = set.next(b1 + 1); k && *k < s.b_[1] && s.uncovered_sample_.size() < kUncoveredSample;
         k = set.next(*k + 1)) {
      s.uncovered_sample_.push_back(*k);
    }
  }

  std::uint64_t prev = 0;
  for (std::size_t m = 1; m <= horizon; ++m) {
    std::uint64_t end = prev + 1;
    end = std::max(end, f.first_index_at_least(s.b(m + 2)) - 1);
    end = std::max(end, ceil_nonneg(static_cast<long double>(m) * log_size(s.block_size(m))));
    if (s.block_size(m + 1) > 1) {
      const std::uint64_t need = ceil_nonneg(static_cast<long double>(m + 1) * log_size(s.block_size(m + 1)));
      end = std::max(end, need == 0 ? 0 : need - 1);
    }
    s.t_.push_back(end - prev);
    s.window_end_.push_back(end);
    prev = end;
  }

  if (window_min(f, 1, s.levels()) < b1) {
    throw Error(ErrorCode::kSchemeBuildFailure, "growth function drops below min B = " + std::to_string(b1) +
                                                    " within the horizon");
  }
  return s;
}

LevelSlot alphabet_layout(const BlockScheme& scheme, std::uint64_t n) {
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "levels are indexed from 1");
  if (n > scheme.levels()) {
    throw Error(ErrorCode::kBeyondHorizon,
                "level " + std::to_string(n) + " lies past the last window end " + std::to_string(scheme.levels()),
                n);
  }
  std::size_t m = 1;
  while (scheme.window_end(m) < n) ++m;
  return {m, n - scheme.window_end(m - 1)};
}

std::vector<SchemeCheck> verify_scheme(const BlockScheme& s) {
  std::vector<SchemeCheck> out;
  const long double e = s.exponent();
  const std::size_t horizon = s.horizon();

  bool ok = s.b(1) == s.set().min();
  out.push_back({"b_1 = min B", ok, "b_1 = " + std::to_string(s.b(1))});

  // minimality and the >= 1 condition, recomputed from the elements
  bool reach = true, minimal = true;
  std::string short_of, not_minimal;
  for (std::size_t m = 1; m < s.b().size(); ++m) {
    const std::vector<Digit> run = s.set().elements(s.b(m), s.b(m + 1));
    CompensatedSum sum;
    for (Digit k : run) sum.add(std::pow(static_cast<long double>(k), -e));
    const long double last = run.empty() ? 0 : std::pow(static_cast<long double>(run.back()), -e);
    if (sum.value() < 1) {
      reach = false;
      short_of += " m=" + std::to_string(m);
    }
    if (sum.value() - last >= 1) {
      minimal = false;
      not_minimal += " m=" + std::to_string(m);
    }
  }
  out.push_back({"block sums reach 1", reach, reach ? "all blocks" : short_of});
  out.push_back({"b_{m+1} minimal", minimal, minimal ? "predecessor sums stay below 1" : not_minimal});

  // b_{m+1} <= f(n) on window m (m >= 2)
  ok = true;
  std::string where;
  for (std::size_t m = 2; m <= horizon; ++m) {
    const Digit lowest = window_min(s.growth(), s.window_end(m - 1) + 1, s.window_end(m));
    if (s.b(m + 1) > lowest) {
      ok = false;
      where += " m=" + std::to_string(m);
    }
  }
  out.push_back({"b_{m+1} <= min f on window m", ok, where.empty() ? "all windows" : where});

  // f >= min B on window 1
  ok = window_min(s.growth(), 1, s.window_end(1)) >= s.b(1);
  out.push_back({"min B <= f on window 1", ok, ""});

  ok = true;
  where.clear();
  for (std::size_t m = 2; m <= horizon; ++m) {
    const long double l = std::log(static_cast<long double>(s.block_size(m)));
    const long double md = static_cast<long double>(m);
    if (md * l > static_cast<long double>(s.window_end(m - 1) + 1) || md * l > static_cast<long double>(s.window_end(m))) {
      ok = false;
      where += " m=" + std::to_string(m);
    }
  }
  out.push_back({"log #B_m / (T_{m-1}+1) <= 1/m and log #B_m / T_m <= 1/m", ok,
                 where.empty() ? "all windows" : where});
  return out;
}

nlohmann::json BlockScheme::to_json() const {
  nlohmann::json tau_j{{"lower", format_real(tau_.lower, 17)},
                       {"upper", format_real(tau_.upper, 17)},
                       {"method", to_string(tau_.method)}};
  if (tau_.exact) tau_j["exact"] = to_string(*tau_.exact);
  std::vector<nlohmann::json> sums;
  for (long double v : sums_) sums.push_back(format_real(v, 17));
  return nlohmann::json{
      {"B", set_.to_json()},
      {"f", f_.to_json()},
      {"epsilon", static_cast<double>(epsilon_)},
      {"horizon", horizon()},
      {"tau", tau_j},
      {"exponent", format_real(exponent_, 17)},
      {"b", b_},
      {"t", t_},
      {"window_end", window_end_},
      {"block_size", sizes_},
      {"block_sum", sums},
      {"uncovered", {{"count", uncovered_count_}, {"sample", uncovered_sample_}}},
  };
}

BlockScheme BlockScheme::from_json(const nlohmann::json& j) {
  try {
    BlockScheme s = build_blocks(DigitSet::from_json(j.at("B")), GrowthFunction::from_json(j.at("f")),
                                 static_cast<long double>(j.at("epsilon").get<double>()),
                                 j.at("horizon").get<std::size_t>());
    if (j.contains("b") && j["b"].get<std::vector<Digit>>() != s.b_) {
      throw Error(ErrorCode::kParse, "stored b sequence disagrees with the rebuilt scheme");
    }
    if (j.contains("t") && j["t"].get<std::vector<std::uint64_t>>() != s.t_) {
      throw Error(ErrorCode::kParse, "stored t sequence disagrees with the rebuilt scheme");
    }
    return s;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::kParse, std::string("block scheme document: ") + ex.what());
  }
}

}  // namespace srcf
