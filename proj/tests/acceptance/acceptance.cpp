// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any line fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "srcf/bounds.hpp"
#include "srcf/cli.hpp"
#include "srcf/expansion.hpp"
#include "srcf/mobius.hpp"
#include "srcf/pressure.hpp"
#include "srcf/transfer.hpp"

using namespace srcf;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

int g_failures = 0;

void criterion(int id, double limit_s, const std::function<Verdict()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (limit_s > 0 && secs > limit_s) {
    v.pass = false;
    v.detail += "; over time limit";
  }
  if (!v.pass) ++g_failures;
  std::printf("[%s] criterion %2d (%.2f s%s): %s\n", v.pass ? "PASS" : "FAIL", id, secs,
              limit_s > 0 ? (", limit " + std::to_string(static_cast<int>(limit_s)) + " s").c_str() : "",
              v.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(long double x, int digits = 6) { return format_real(x, digits); }

const SignSequence kAlternating = SignSequence::periodic({Sign::kPlus, Sign::kMinus});

Verdict generator_images() {
  for (Digit i = 1; i <= 10000; ++i) {
    if (!(fundamental_interval(generator(Sign::kPlus, i)) == RationalInterval{Rational(1, i + 1), Rational(1, i)})) {
      return {false, "sigma = +1, i = " + std::to_string(i)};
    }
    if (i >= 2 &&
        !(fundamental_interval(generator(Sign::kMinus, i)) == RationalInterval{Rational(1, i), Rational(1, i - 1)})) {
      return {false, "sigma = -1, i = " + std::to_string(i)};
    }
  }
  return {true, "exact images for i <= 10000, both signs"};
}

Verdict backward_identity() {
  const std::vector<Sign> s(1000, Sign::kMinus);
  const std::vector<Digit> d(1000, 2);
  for (std::size_t n = 1; n <= 1000; ++n) {
    const Rational v = evaluate(std::span(s).first(n), std::span(d).first(n), Rational(0));
    if (v != Rational(n, n + 1)) return {false, "n = " + std::to_string(n) + " gives " + to_string(v)};
  }
  return {true, "(2,...,2) -> n/(n+1) exactly for n <= 1000"};
}

std::vector<SignSequence> twenty_sign_sequences() {
  std::vector<SignSequence> out{SignSequence::constant(Sign::kPlus), SignSequence::constant(Sign::kMinus)};
  const Sign P = Sign::kPlus, M = Sign::kMinus;
  for (const std::vector<Sign>& pat : std::vector<std::vector<Sign>>{
           {P, M}, {M, P}, {P, P, M}, {M, M, P}, {P, M, M, P}, {P, P, P, M}, {M, P, P}, {P, M, P, M, M}}) {
    out.push_back(SignSequence::periodic(pat));
  }
  for (std::uint64_t seed = 1; seed <= 10; ++seed) out.push_back(SignSequence::seeded_random(0.3 + 0.04 * seed, seed));
  return out;
}

// sign of (p + sqrt d)/r - v for r > 0
int surd_cmp(const Integer& p, const Integer& r, const Integer& d, const Rational& v) {
  const Rational u = v * Rational(r) - Rational(p);
  if (u <= 0) return 1;
  const Rational sq = u * u;
  return Rational(d) > sq ? 1 : (Rational(d) < sq ? -1 : 0);
}

Verdict expansion_correctness() {
  const auto sigmas = twenty_sign_sequences();
  std::mt19937_64 rng(20240601);
  std::size_t checked = 0;
  for (int t = 0; t < 500; ++t) {
    Integer d;
    do {
      d = Integer(2 + rng() % 9999);
    } while (boost::multiprecision::sqrt(d) * boost::multiprecision::sqrt(d) == d);
    const Integer r(2 + rng() % 97);
    const Integer p = -boost::multiprecision::sqrt(d) + Integer(1 + rng() % static_cast<std::uint64_t>(r - 1));
    for (const SignSequence& sigma : sigmas) {
      const Expansion e = expand(NumberInput::surd(p, 1, r, d), sigma, 60);
      if (e.digits.size() != 60) return {false, "surd " + std::to_string(t) + " stopped: " + to_string(e.status)};
      MobiusMap m;
      for (std::size_t k = 0; k < 60; ++k) {
        m = m * generator(e.signs[k], e.digits[k]);
        const RationalInterval i = fundamental_interval(m);
        if (surd_cmp(p, r, d, i.lo) < 0 || surd_cmp(p, r, d, i.hi) > 0) {
          return {false, "surd " + std::to_string(t) + " outside its depth-" + std::to_string(k + 1) + " interval"};
        }
        ++checked;
      }
    }
  }
  std::size_t words = 0;
  for (const SignSequence& sigma : sigmas) {
    const std::vector<Sign> s = sigma.prefix(4);
    std::vector<RationalInterval> all;
    const auto first = [&](std::size_t k) -> Digit { return s[k] == Sign::kPlus ? 1 : 2; };
    std::vector<Digit> w{first(0), first(1), first(2), first(3)};
    for (bool done = false; !done;) {
      all.push_back(fundamental_interval(s, w));
      done = true;
      for (std::size_t k = 4; k-- > 0;) {
        if (++w[k] <= 6) {
          done = false;
          break;
        }
        w[k] = first(k);
      }
    }
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.lo < b.lo; });
    for (std::size_t i = 1; i < all.size(); ++i) {
      if (all[i - 1].hi > all[i].lo) return {false, "overlapping depth-4 intervals at " + all[i].str()};
    }
    words += all.size();
  }
  return {true, std::to_string(checked) + " nested enclosures (500 surds x 20 sign sequences x depth 60); " +
                    std::to_string(words) + " depth-4 words interior-disjoint"};
}

Verdict contraction_distortion() {
  for (Digit i = 3; i <= 1000; ++i) {
    for (Sign s : {Sign::kPlus, Sign::kMinus}) {
      const ScalingProfile p = scaling_profile(generator(s, i));
      if (!p.sup_xtilde || *p.sup_xtilde > Rational(1, 2)) return {false, "digit " + std::to_string(i)};
    }
  }
  const DistortionConstant c = distortion_constant(Digit{3});
  const long double log_c = to_long_double(c.log_value);
  if (std::abs(log_c - 116.0L / 35.0L) > 1e-15L) return {false, "log C = " + fmt(log_c, 12) + ", expected 116/35"};
  std::mt19937_64 rng(7);
  long double worst = 0;
  for (int t = 0; t < 10000; ++t) {
    const std::size_t len = 1 + rng() % 25;
    MobiusMap m;
    for (std::size_t k = 0; k < len; ++k) {
      const Digit d = rng() % 4 == 0 ? 3 + rng() % 100000 : 3 + rng() % 8;
      m = m * generator(rng() % 2 ? Sign::kPlus : Sign::kMinus, d);
    }
    const DerivativeBounds b = derivative_bounds(m, extension_domain());
    worst = std::max(worst, log_abs(b.sup / b.inf));
  }
  return {worst <= log_c, "sup <= 1/2 on the extension domain for 3 <= i <= 1000; worst distortion ratio " +
                              fmt(std::exp(worst), 4) + " over 10^4 words vs C = " + fmt(std::exp(log_c), 6)};
}

Verdict bowen_oracle() {
  const NonAutonomousIFS sys = autonomous_system(Sign::kPlus, {1, 2}, 20);
  BowenOptions o;
  o.tolerance = 1e-3L;
  o.estimator = PressureEstimator::kIncrement;
  for (std::uint64_t n = 2; n <= 20; ++n) o.depths.push_back(n);
  const BowenBracket b = bowen_bisect(sys, o);
  const TransferRoot refined = transfer_dimension(sys, 1e-12L);
  const TransferRoot high = transfer_dimension(sys, 1e-12L, 8, 2 * std::max<std::size_t>(refined.degree, 64));
  const long double root = (refined.lo + refined.hi) / 2;
  const long double value = (high.lo + high.hi) / 2;
  const bool certified = b.status == BowenStatus::kCertified;
  const bool width = b.s_plus - b.s_minus <= 1e-2L;
  const bool contains = b.s_minus <= root && root <= b.s_plus;
  const bool agree = std::abs(root - value) <= 1e-3L && std::abs((b.s_minus + b.s_plus) / 2 - value) <= 1e-3L;
  std::ostringstream out;
  out << "Bowen [" << fmt(b.s_minus, 8) << ", " << fmt(b.s_plus, 8) << "], transfer root " << fmt(root, 12)
      << " (degree " << refined.degree << "), doubled-degree value " << fmt(value, 12) << " (degree " << high.degree
      << ")";
  return {certified && width && contains && agree, out.str()};
}

Verdict lower_certificate_squares() {
  const LowerCertificate c = lower_certificate(DigitSet::powers(2), GrowthFunction::power(1, 1), kAlternating, 0.1L, 0.1L);
  const bool blocks = c.scheme->b(1) == 1 && c.scheme->b(2) == 4 && c.scheme->b(3) == 25;
  std::uint64_t literal_ok = 0, chain_ok = 0;
  std::string literal_fail;
  for (const DepthCheck& d : c.depths) {
    literal_ok += d.literal_pass;
    chain_ok += d.pass;
    if (!d.literal_pass && literal_fail.empty()) {
      literal_fail = " (first: n = " + std::to_string(d.n) + ", log Z_n >= " + fmt(d.z_low) + " < " + fmt(c.log_floor_literal) + ")";
    }
  }
  const bool s_ok = c.certified && std::abs(c.s - 0.4L / 2.1L) <= 1e-6L;
  const bool literal = literal_ok == c.depths.size();
  std::ostringstream out;
  out << "blocks (" << c.scheme->b(1) << "," << c.scheme->b(2) << "," << c.scheme->b(3) << ") "
      << (blocks ? "ok" : "MISMATCH") << "; closed-form floor log = " << fmt(c.log_floor_literal) << " holds at "
      << literal_ok << "/" << c.depths.size() << " scheduled depths" << literal_fail
      << "; per-level chain floor log = " << fmt(c.log_floor) << " holds at " << chain_ok << "/" << c.depths.size()
      << " (N = " << c.constants.n << ", C_0 = " << to_string(c.constants.c_window) << ")"
      << "; certified s = " << fmt(c.s, 12) << " vs 0.4/2.1 = " << fmt(0.4L / 2.1L, 12);
  return {blocks && literal && s_ok, out.str()};
}

Verdict sandwich() {
  ReportOptions o;
  o.epsilons = {0.1L, 0.05L, 0.02L};
  o.tolerance = 0;
  std::ostringstream out;
  bool ok = true;
  const auto run = [&](const char* name, const DigitSet& b, long double target, bool monotone) {
    const DimensionReport r = dimension_report(b, GrowthFunction::power(1, 1), kAlternating, o);
    long double prev_lo = -1, prev_hi = 2;
    out << name << ":";
    for (const DimensionRow& row : r.rows) {
      if (!row.lower || !row.upper || !row.lower->certified || !row.upper->certified) {
        ok = false;
        out << " uncertified row";
        continue;
      }
      const long double lo = row.lower->s, hi = row.upper->bound;
      out << " [" << fmt(lo, 4) << ", " << fmt(hi, 4) << "]";
      ok = ok && lo < target && hi > target;
      if (monotone) ok = ok && lo > prev_lo && hi < prev_hi;
      prev_lo = lo;
      prev_hi = hi;
    }
    ok = ok && r.rows.size() == 3 && prev_hi - prev_lo <= 0.1L;
    out << " gap " << fmt(prev_hi - prev_lo, 4) << "; ";
  };
  run("N", DigitSet::naturals(), 0.5L, true);
  run("squares", DigitSet::powers(2), 0.25L, false);
  return {ok, out.str()};
}

Verdict upper_soundness() {
  const UpperCertificate u = upper_certificate(DigitSet::naturals(), SignSequence::constant(Sign::kPlus), 0.5L);
  bool covers = u.covers.size() == 4;
  std::ostringstream out;
  out << "L = " << to_string(u.l) << ", log condition " << fmt(u.log_condition, 6) << " (at L-1: "
      << fmt(u.log_condition_below, 6) << "); cover sums";
  for (std::size_t i = 0; i < u.covers.size(); ++i) {
    covers = covers && u.covers[i].sum <= 1 && (i == 0 || u.covers[i].sum <= u.covers[i - 1].sum);
    out << " " << fmt(u.covers[i].sum, 3);
  }
  return {u.certified && u.log_condition <= 0 && covers, out.str()};
}

Verdict membership() {
  struct Case {
    const char* name;
    DigitSet b;
    SignSequence sigma;
    std::size_t horizon;
  };
  const std::vector<Case> cases{{"squares, sigma = +1", DigitSet::powers(2), SignSequence::constant(Sign::kPlus), 4},
                                {"N, alternating", DigitSet::naturals(), kAlternating, 4}};
  std::ostringstream out;
  bool ok = true;
  for (const Case& c : cases) {
    const GrowthFunction f = GrowthFunction::power(1, 1);
    const auto scheme = std::make_shared<const BlockScheme>(build_blocks(c.b, f, 0.1L, c.horizon));
    const NonAutonomousIFS sys = assemble(c.sigma, scheme, AdmissibilityPolicy::kRepairFirstWindow);
    const std::uint64_t depth = sys.levels();
    for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
      const SampledAddress a = sample_address(sys, seed, depth);
      for (std::uint64_t n = 1; n <= depth; ++n) {
        const Digit d = a.digits[n - 1];
        if (!c.b.contains(Integer(d)) || d > f(n)) {
          ok = false;
          out << c.name << ": seed " << seed << " level " << n << " digit " << d << "; ";
          break;
        }
      }
    }
    long double worst = -1;
    for (std::uint64_t n = 1; n <= depth; ++n) {
      std::size_t m = 1;
      while (scheme->window_end(m) < n) ++m;
      const long double v = std::log(static_cast<long double>(sys.alphabet(n).size())) / n;
      worst = std::max(worst, v - 1.0L / m);
    }
    ok = ok && worst <= 0;
    out << c.name << ": 1000 addresses to depth " << depth << ", max (1/n)log#I - 1/m = " << fmt(worst, 4) << "; ";
  }
  return {ok, out.str()};
}

Verdict determinism() {
  const std::vector<std::pair<std::string, std::string>> runs{
      {"pressure", R"({"alphabet": [1, 2, 3], "sigma": {"kind": "periodic", "pattern": [1, -1]}, "depth": 12, "seed": 5})"},
      {"dim-lower", R"({"B": {"kind": "powers", "exponent": 2}, "f": {"kind": "power", "c": 1, "p": 1},
                        "sigma": {"kind": "periodic", "pattern": [1, -1]}, "epsilon": 0.1})"},
      {"dim-upper", R"({"B": {"kind": "naturals"}, "sigma": {"kind": "constant", "value": 1}, "epsilon": 0.5})"},
      {"dim", R"({"B": {"kind": "naturals"}, "f": {"kind": "power", "c": 1, "p": 1},
                  "sigma": {"kind": "periodic", "pattern": [1, -1]}})"},
      {"verify", R"({"B": {"kind": "powers", "exponent": 2}, "f": {"kind": "power", "c": 1, "p": 1}, "seed": 11})"}};
  std::size_t compared = 0;
  for (const auto& [cmd, inst] : runs) {
    for (bool csv : {false, true}) {
      if (csv && cmd == "verify") continue;
      CliFlags base;
      base.csv = csv;
      const std::string one = run_command(cmd, inst, base).out;
      for (unsigned t : {4u, 8u}) {
        CliFlags f = base;
        f.threads = t;
        if (run_command(cmd, inst, f).out != one) return {false, cmd + (csv ? " (csv)" : "") + " differs at " + std::to_string(t) + " threads"};
        ++compared;
      }
    }
  }
  return {true, std::to_string(compared) + " outputs byte-identical to the 1-thread run (4 and 8 threads)"};
}

}  // namespace

int main() {
  criterion(1, 5, generator_images);
  criterion(2, 5, backward_identity);
  criterion(3, 120, expansion_correctness);
  criterion(4, 120, contraction_distortion);
  criterion(5, 60, bowen_oracle);
  criterion(6, 300, lower_certificate_squares);
  criterion(7, 900, sandwich);
  criterion(8, 120, upper_soundness);
  criterion(9, 60, membership);
  criterion(10, 0, determinism);
  std::printf("%d of 10 criteria failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
