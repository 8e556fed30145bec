#include "srcf/pressure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "srcf/error.hpp"

namespace srcf {

namespace {

// Relative slack for rounding in sums of exp/log terms.
constexpr long double kRoundingSlack = 1e-15L;

struct OverflowSignal {};

// One DFS per first digit. T is __int128 on the fast path; Integer when a row outgrows it.
template <class T>
struct RowOps;

template <>
struct RowOps<__int128> {
  static __int128 step(__int128 c, __int128 d, int sigma, Digit a) {
    __int128 ad;
    __int128 r;
    if (__builtin_mul_overflow(d, static_cast<__int128>(a), &ad) || __builtin_add_overflow(c, ad, &r)) {
      throw OverflowSignal{};
    }
    (void)sigma;
    return r;
  }
  static long double log_norm(__int128 c, __int128 d) {
    __int128 cd;
    if (__builtin_add_overflow(c, d, &cd)) throw OverflowSignal{};
    const __int128 x = d < 0 ? -d : d;
    const __int128 y = cd < 0 ? -cd : cd;
    return 2 * std::log(static_cast<long double>(std::min(x, y)));
  }
};

template <>
struct RowOps<Integer> {
  static Integer step(const Integer& c, const Integer& d, int, Digit a) { return c + d * a; }
  static long double log_norm(const Integer& c, const Integer& d) {
    const Integer x = abs(d);
    const Integer y = abs(c + d);
    return 2 * log_abs(x < y ? x : y);
  }
};

struct LevelView {
  std::vector<const std::vector<Digit>*> alphabets;
  std::vector<int> signs;
};

// Bottom row (c, d) of the composed matrix; appending (0,1;sigma,a) maps it to (sigma d, c + a d).
template <class T>
void dfs(const LevelView& v, std::size_t level, const T& c, const T& d, std::vector<std::vector<long double>>& out) {
  out[level].push_back(RowOps<T>::log_norm(c, d));
  if (level + 1 == v.alphabets.size()) return;
  const int sigma = v.signs[level + 1];
  const T nc = sigma > 0 ? d : T(-d);
  for (Digit a : *v.alphabets[level + 1]) {
    dfs<T>(v, level + 1, nc, RowOps<T>::step(c, d, sigma, a), out);
  }
}

struct SideSums {
  long double lo = 0;  // log sum_i inf^s
  long double hi = 0;  // log sum_i sup^s
};

// log sum_i exp(-2 s log x_i) over x_i = base digit offsets, shifted by the largest term.
long double log_power_sum(const std::vector<Digit>& digits, long double s, int offset) {
  if (s == 0) return std::log(static_cast<long double>(digits.size()));
  long double ref = std::numeric_limits<long double>::infinity();
  std::vector<long double> logs;
  logs.reserve(digits.size());
  for (Digit a : digits) {
    const long double x = static_cast<long double>(a) + offset;
    logs.push_back(std::log(x));
    ref = std::min(ref, logs.back());
  }
  CompensatedSum sum;
  for (long double l : logs) sum.add(std::exp(-2 * s * (l - ref)));
  return -2 * s * ref + std::log(sum.value());
}

SideSums side_sums(const std::vector<Digit>& digits, Sign sign, long double s) {
  // +1: sup 1/i^2, inf 1/(i+1)^2.  -1: sup 1/(i-1)^2, inf 1/i^2.
  if (sign == Sign::kPlus) return {log_power_sum(digits, s, 1), log_power_sum(digits, s, 0)};
  return {log_power_sum(digits, s, 0), log_power_sum(digits, s, -1)};
}

struct SegmentSums {
  SideSums plus;
  SideSums minus;
};

std::vector<SegmentSums> segment_sums(const NonAutonomousIFS& system, long double s, std::uint64_t n) {
  std::map<std::pair<std::size_t, int>, SideSums> cache;
  std::vector<SegmentSums> out;
  for (const LevelSegment& seg : system.segments()) {
    if (seg.first > n) break;
    SegmentSums ss;
    for (Sign sg : {Sign::kPlus, Sign::kMinus}) {
      const std::size_t id = sg == Sign::kPlus ? seg.alphabet_plus : seg.alphabet_minus;
      const std::vector<Digit>& a = system.alphabets()[id];
      // digit 1 under -1 never occurs at a level; skip the pole
      if (sg == Sign::kMinus && a.front() == 1) continue;
      auto key = std::make_pair(id, value(sg));
      auto it = cache.find(key);
      if (it == cache.end()) it = cache.emplace(key, side_sums(a, sg, s)).first;
      (sg == Sign::kPlus ? ss.plus : ss.minus) = it->second;
    }
    out.push_back(ss);
  }
  return out;
}

PressureBracket make_bracket(long double s, std::uint64_t n, long double lo, long double hi, PartitionMode mode) {
  PressureBracket b;
  b.s = s;
  b.n = n;
  if (s != 0) {
    lo -= kRoundingSlack * (std::abs(lo) + static_cast<long double>(n));
    hi += kRoundingSlack * (std::abs(hi) + static_cast<long double>(n));
  }
  b.z_low = lo;
  b.z_high = hi;
  b.p_low = lo / static_cast<long double>(n);
  b.p_high = hi / static_cast<long double>(n);
  b.mode = mode;
  return b;
}

std::vector<PressureBracket> factorized_profile(const NonAutonomousIFS& system, long double s,
                                                const std::vector<std::uint64_t>& depths) {
  if (depths.empty()) return {};
  const std::uint64_t max_n = *std::max_element(depths.begin(), depths.end());
  const std::vector<SegmentSums> sums = segment_sums(system, s, max_n);
  const auto& segs = system.segments();
  std::vector<PressureBracket> out;
  for (std::uint64_t n : depths) {
    if (n == 0 || n > system.levels()) throw Error(ErrorCode::kBeyondHorizon, "depth outside the system's levels", n);
    CompensatedSum lo;
    CompensatedSum hi;
    for (std::size_t i = 0; i < sums.size() && segs[i].first <= n; ++i) {
      const std::uint64_t last = std::min(segs[i].last, n);
      const std::uint64_t plus = system.sigma().count_plus(segs[i].first, last);
      const long double p = static_cast<long double>(plus);
      const long double m = static_cast<long double>(last - segs[i].first + 1 - plus);
      if (plus > 0) {
        lo.add(p * sums[i].plus.lo);
        hi.add(p * sums[i].plus.hi);
      }
      if (m > 0) {
        lo.add(m * sums[i].minus.lo);
        hi.add(m * sums[i].minus.hi);
      }
    }
    out.push_back(make_bracket(s, n, lo.value(), hi.value(), PartitionMode::kFactorized));
  }
  return out;
}

}  // namespace

const char* to_string(PartitionMode m) { return m == PartitionMode::kExact ? "exact" : "factorized"; }

const char* to_string(PressureEstimator e) { return e == PressureEstimator::kAverage ? "average" : "increment"; }

const char* to_string(BowenStatus s) {
  return s == BowenStatus::kCertified ? "certified" : "IndeterminateAtDepth";
}

nlohmann::json PressureBracket::to_json() const {
  return {{"s", format_real(s, 15)},
          {"n", n},
          {"mode", to_string(mode)},
          {"log_Z", format_bracket(z_low, z_high, 15)},
          {"pressure", format_bracket(p_low, p_high, 15)}};
}

std::uint64_t WordTable::words(std::uint64_t k) const {
  std::uint64_t total = 0;
  for (const auto& chunk : chunks_) total += chunk.at(k - 1).size();
  return total;
}

std::vector<long double> WordTable::log_partition(long double s, const ExecutionOptions& exec) const {
  const std::size_t parts = chunks_.size();
  std::vector<long double> ref(depth_, std::numeric_limits<long double>::infinity());
  for (const auto& chunk : chunks_) {
    for (std::uint64_t k = 0; k < depth_; ++k) {
      for (long double l : chunk[k]) ref[k] = std::min(ref[k], l);
    }
  }
  std::vector<std::vector<CompensatedSum>> partial(depth_, std::vector<CompensatedSum>(parts));
  parallel_for(parts, exec.threads, [&](std::size_t i) {
    for (std::uint64_t k = 0; k < depth_; ++k) {
      CompensatedSum sum;
      for (long double l : chunks_[i][k]) sum.add(std::exp(-s * (l - ref[k])));
      partial[k][i] = sum;
    }
  });
  std::vector<long double> out(depth_);
  for (std::uint64_t k = 0; k < depth_; ++k) {
    long double total;
    if (exec.deterministic) {
      total = pairwise_sum(partial[k]).value();
    } else {
      CompensatedSum c;
      for (const auto& p : partial[k]) c.add(p);
      total = c.value();
    }
    out[k] = -s * ref[k] + std::log(total);
  }
  return out;
}

WordTable enumerate_words(const NonAutonomousIFS& system, std::uint64_t n, const EnumerationOptions& options) {
  if (n == 0 || n > system.levels()) throw Error(ErrorCode::kBeyondHorizon, "depth outside the system's levels", n);
  LevelView view;
  long double count = 1;
  for (std::uint64_t k = 1; k <= n; ++k) {
    view.alphabets.push_back(&system.alphabet(k));
    view.signs.push_back(value(system.sign(k)));
    count *= static_cast<long double>(view.alphabets.back()->size());
  }
  if (count > static_cast<long double>(options.cap)) {
    throw Error(ErrorCode::kEnumerationCapExceeded,
                "EnumerationCapExceeded: " + format_real(count, 4) + " words at depth " + std::to_string(n) +
                    " exceed the cap " + std::to_string(options.cap) + "; use factorized mode",
                n);
  }
  WordTable table;
  table.depth_ = n;
  const std::vector<Digit>& first = *view.alphabets[0];
  table.chunks_.assign(first.size(), std::vector<std::vector<long double>>(n));
  parallel_for(first.size(), options.exec.threads, [&](std::size_t i) {
    auto& out = table.chunks_[i];
    const int sigma = view.signs[0];
    try {
      dfs<__int128>(view, 0, static_cast<__int128>(sigma), static_cast<__int128>(first[i]), out);
    } catch (const OverflowSignal&) {
      for (auto& v : out) v.clear();
      dfs<Integer>(view, 0, Integer(sigma), Integer(first[i]), out);
    }
  });
  return table;
}

PressureBracket factorized_bracket(const NonAutonomousIFS& system, long double s, std::uint64_t n) {
  return factorized_profile(system, s, {n}).front();
}

std::vector<PressureBracket> partition_profile(const NonAutonomousIFS& system, long double s,
                                               const std::vector<std::uint64_t>& depths, PartitionMode mode,
                                               const EnumerationOptions& options) {
  if (s < 0) throw Error(ErrorCode::kInvalidArgument, "s must be nonnegative");
  if (mode == PartitionMode::kFactorized) return factorized_profile(system, s, depths);
  if (depths.empty()) return {};
  const std::uint64_t max_n = *std::max_element(depths.begin(), depths.end());
  const WordTable table = enumerate_words(system, max_n, options);
  const std::vector<long double> z = table.log_partition(s, options.exec);
  std::vector<PressureBracket> out;
  for (std::uint64_t n : depths) {
    if (n == 0) throw Error(ErrorCode::kInvalidArgument, "depth must be positive");
    out.push_back(make_bracket(s, n, z[n - 1], z[n - 1], PartitionMode::kExact));
  }
  return out;
}

PressureBracket partition_bracket(const NonAutonomousIFS& system, long double s, std::uint64_t n, PartitionMode mode,
                                  const EnumerationOptions& options) {
  return partition_profile(system, s, {n}, mode, options).front();
}

nlohmann::json PressureRecord::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& b : brackets) rows.push_back(b.to_json());
  return {{"s", format_real(s, 15)}, {"burn_in", burn_in}, {"positive", positive},
          {"negative", negative}, {"brackets", rows}};
}

PressureRecord lower_pressure(const NonAutonomousIFS& system, long double s, const std::vector<std::uint64_t>& depths,
                              PartitionMode mode, std::uint64_t burn_in, const EnumerationOptions& options) {
  if (depths.empty()) throw Error(ErrorCode::kInvalidArgument, "empty depth schedule");
  PressureRecord r;
  r.s = s;
  r.brackets = partition_profile(system, s, depths, mode, options);
  r.burn_in = burn_in ? burn_in : depths[depths.size() >= 3 ? depths.size() - 3 : 0];
  r.positive = true;
  r.negative = true;
  bool any = false;
  for (const PressureBracket& b : r.brackets) {
    if (b.n < r.burn_in) continue;
    any = true;
    r.positive = r.positive && b.p_low > 0;
    r.negative = r.negative && b.p_high < 0;
  }
  r.positive = r.positive && any;
  r.negative = r.negative && any;
  return r;
}

nlohmann::json BowenBracket::to_json() const {
  const auto ev = [](const PressureSign& e) {
    return nlohmann::json{{"s", format_real(e.s, 15)}, {"estimate", format_bracket(e.low, e.high, 15)}, {"sign", e.sign}};
  };
  return {{"s", format_bracket(s_minus, s_plus, 15)},
          {"status", to_string(status)},
          {"estimator", to_string(estimator)},
          {"mode", to_string(mode)},
          {"depths", depths},
          {"iterations", iterations},
          {"evidence_minus", ev(evidence_minus)},
          {"evidence_plus", ev(evidence_plus)},
          {"detail", detail}};
}

BowenBracket bowen_bisect(const NonAutonomousIFS& system, const BowenOptions& options) {
  if (options.depths.empty()) throw Error(ErrorCode::kInvalidArgument, "empty depth schedule");
  if (!std::is_sorted(options.depths.begin(), options.depths.end())) {
    throw Error(ErrorCode::kInvalidArgument, "depth schedule must be ascending");
  }
  if (!(options.tolerance > 0)) throw Error(ErrorCode::kInvalidArgument, "tolerance must be positive");
  const bool increment = options.estimator == PressureEstimator::kIncrement;
  if (increment && options.depths.front() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "increment estimator needs depths >= 2");
  }
  const std::size_t k = std::min(std::max<std::size_t>(1, options.persistence), options.depths.size());
  const std::vector<std::uint64_t> window(options.depths.end() - static_cast<std::ptrdiff_t>(k), options.depths.end());

  std::vector<std::uint64_t> needed = window;
  if (increment) {
    for (std::uint64_t n : window) needed.push_back(n - 1);
  }
  std::sort(needed.begin(), needed.end());
  needed.erase(std::unique(needed.begin(), needed.end()), needed.end());

  std::optional<WordTable> table;
  if (options.mode == PartitionMode::kExact) table = enumerate_words(system, needed.back(), options.enumeration);

  const auto evaluate = [&](long double s) {
    std::map<std::uint64_t, std::pair<long double, long double>> z;
    if (table) {
      const std::vector<long double> all = table->log_partition(s, options.enumeration.exec);
      for (std::uint64_t n : needed) z[n] = {all[n - 1], all[n - 1]};
    } else {
      for (const PressureBracket& b : factorized_profile(system, s, needed)) z[b.n] = {b.z_low, b.z_high};
    }
    PressureSign e;
    e.s = s;
    bool pos = true;
    bool neg = true;
    for (std::uint64_t n : window) {
      long double lo;
      long double hi;
      if (increment) {
        lo = z[n].first - z[n - 1].second;
        hi = z[n].second - z[n - 1].first;
      } else {
        lo = z[n].first / static_cast<long double>(n);
        hi = z[n].second / static_cast<long double>(n);
      }
      pos = pos && lo > 0;
      neg = neg && hi < 0;
      e.low = lo;
      e.high = hi;
    }
    e.sign = pos ? 1 : (neg ? -1 : 0);
    return e;
  };

  BowenBracket out;
  out.estimator = options.estimator;
  out.mode = options.mode;
  out.depths = options.depths;
  out.s_minus = 0;
  out.s_plus = 1;
  out.evidence_minus = evaluate(0);
  out.evidence_plus = evaluate(1);
  while (out.s_plus - out.s_minus > options.tolerance && out.iterations < options.max_iterations) {
    const long double mid = (out.s_minus + out.s_plus) / 2;
    const PressureSign e = evaluate(mid);
    ++out.iterations;
    if (e.sign > 0) {
      out.s_minus = mid;
      out.evidence_minus = e;
    } else if (e.sign < 0) {
      out.s_plus = mid;
      out.evidence_plus = e;
    } else {
      out.status = BowenStatus::kIndeterminateAtDepth;
      out.detail = "pressure estimate straddles 0 at s = " + format_real(mid, 15) + " within depths " +
                   std::to_string(window.front()) + ".." + std::to_string(window.back());
      return out;
    }
  }
  if (out.s_plus - out.s_minus > options.tolerance) {
    out.status = BowenStatus::kIndeterminateAtDepth;
    out.detail = "iteration limit reached";
  } else {
    out.detail = "pressure sign persisted over the last " + std::to_string(k) + " scheduled depths";
  }
  return out;
}

}  // namespace srcf
