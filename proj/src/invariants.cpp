#include "srcf/invariants.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include <boost/multiprecision/integer.hpp>

#include "srcf/block_scheme.hpp"
#include "srcf/error.hpp"
#include "srcf/expansion.hpp"
#include "srcf/ifs.hpp"
#include "srcf/mobius.hpp"

namespace srcf {

namespace {

// sign of (p + q sqrt d)/r - v
int compare_surd(const QuadraticSurd& x, const Rational& v) {
  const Rational u = v * Rational(x.r) - Rational(x.p);  // sign of q sqrt d - u, times sign r
  const Rational lhs = Rational(x.q * x.q * x.d);
  int sign;
  if (x.q > 0 && u <= 0) {
    sign = 1;
  } else if (x.q < 0 && u >= 0) {
    sign = -1;
  } else {
    const int mag = lhs > u * u ? 1 : (lhs < u * u ? -1 : 0);
    sign = x.q > 0 ? mag : -mag;
  }
  return x.r > 0 ? sign : -sign;
}

InvariantResult generator_images() {
  for (Digit i = 1; i <= 2000; ++i) {
    const RationalInterval p = fundamental_interval(generator(Sign::kPlus, i));
    if (!(p == RationalInterval{Rational(1, i + 1), Rational(1, i)})) {
      return {"generator-images", false, "phi_{+1," + std::to_string(i) + "}([0,1]) = " + p.str()};
    }
    if (i >= 2) {
      const RationalInterval m = fundamental_interval(generator(Sign::kMinus, i));
      if (!(m == RationalInterval{Rational(1, i), Rational(1, i - 1)})) {
        return {"generator-images", false, "phi_{-1," + std::to_string(i) + "}([0,1]) = " + m.str()};
      }
    }
  }
  return {"generator-images", true, "exact images for digits up to 2000, both signs"};
}

InvariantResult backward_identity() {
  std::vector<Sign> s;
  std::vector<Digit> d;
  for (std::uint64_t n = 1; n <= 300; ++n) {
    s.push_back(Sign::kMinus);
    d.push_back(2);
    const Rational v = evaluate(s, d, Rational(0));
    if (v != Rational(n, n + 1)) return {"backward-identity", false, "n = " + std::to_string(n) + " gives " + to_string(v)};
  }
  return {"backward-identity", true, "sigma = -1, digits 2 (n times), point 0 -> n/(n+1) for n <= 300"};
}

InvariantResult expansion_round_trip(const SignSequence& sigma, std::uint64_t seed, std::size_t depth) {
  std::mt19937_64 rng(seed);
  std::size_t count = 0;
  for (int trial = 0; trial < 50; ++trial) {
    Integer d;
    do {
      d = Integer(2 + rng() % 999);
    } while (boost::multiprecision::sqrt(d) * boost::multiprecision::sqrt(d) == d);
    const Integer r(2 + rng() % 49);
    const Integer p = -boost::multiprecision::sqrt(d) + Integer(1 + rng() % static_cast<std::uint64_t>(r - 1));
    const QuadraticSurd x{p, 1, r, d};
    const Expansion e = expand(NumberInput::surd(p, 1, r, d), sigma, depth);
    if (e.digits.size() != depth) {
      return {"expansion-round-trip", false, "surd " + std::to_string(trial) + " stopped early: " + to_string(e.status)};
    }
    for (std::size_t k = 1; k <= depth; ++k) {
      const RationalInterval i = singleton_check(e.signs, e.digits, k);
      if (compare_surd(x, i.lo) < 0 || compare_surd(x, i.hi) > 0) {
        return {"expansion-round-trip", false, "x outside its depth-" + std::to_string(k) + " interval"};
      }
    }
    ++count;
  }
  return {"expansion-round-trip", true,
          std::to_string(count) + " seeded surds lie in every fundamental interval up to depth " + std::to_string(depth)};
}

InvariantResult interior_disjoint(const SignSequence& sigma) {
  std::vector<RationalInterval> all;
  const std::size_t depth = 3;
  std::vector<Sign> signs{sigma[1], sigma[2], sigma[3]};
  const auto first = [&](std::size_t k) -> Digit { return signs[k] == Sign::kPlus ? 1 : 2; };
  std::vector<Digit> w{first(0), first(1), first(2)};
  while (true) {
    all.push_back(fundamental_interval(signs, w));
    std::size_t k = depth;
    bool done = true;
    while (k > 0) {
      --k;
      if (++w[k] <= 5) {
        done = false;
        break;
      }
      w[k] = first(k);
    }
    if (done) break;
  }
  std::sort(all.begin(), all.end(), [](const RationalInterval& a, const RationalInterval& b) { return a.lo < b.lo; });
  for (std::size_t i = 1; i < all.size(); ++i) {
    if (!all[i - 1].interior_disjoint(all[i])) return {"interior-disjoint", false, "overlap at " + all[i].str()};
  }
  return {"interior-disjoint", true, std::to_string(all.size()) + " depth-3 words over digits <= 5"};
}

InvariantResult contraction() {
  for (Digit i = 3; i <= 1000; ++i) {
    for (Sign s : {Sign::kPlus, Sign::kMinus}) {
      const ScalingProfile p = scaling_profile(generator(s, i));
      if (!p.sup_xtilde || *p.sup_xtilde > Rational(1, 2)) {
        return {"contraction", false, "digit " + std::to_string(i) + " exceeds 1/2 on the extension domain"};
      }
    }
  }
  return {"contraction", true, "sup over the extension domain <= 1/2 for digits 3..1000, both signs"};
}

InvariantResult distortion(std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x5bd1e995ULL);
  const DistortionConstant c = distortion_constant(Digit{3});
  const long double log_c = to_long_double(c.log_value);
  long double worst = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t len = 1 + rng() % 20;
    MobiusMap m;
    for (std::size_t k = 0; k < len; ++k) {
      m = m * generator(rng() % 2 ? Sign::kPlus : Sign::kMinus, 3 + rng() % 48);
    }
    const DerivativeBounds b = derivative_bounds(m, extension_domain());
    worst = std::max(worst, log_abs(b.sup / b.inf));
  }
  std::ostringstream out;
  out << "max log ratio " << format_real(worst, 8) << " vs log C = " << format_real(log_c, 8);
  return {"distortion", worst <= log_c, out.str()};
}

void scheme_checks(const InvariantOptions& o, std::vector<InvariantResult>& out) {
  const auto scheme =
      std::make_shared<const BlockScheme>(build_blocks(*o.b, *o.f, o.epsilon, o.horizon));
  bool ok = true;
  std::string detail;
  for (const SchemeCheck& c : verify_scheme(*scheme)) {
    if (!c.pass) {
      ok = false;
      detail += c.name + ": " + c.detail + "; ";
    }
  }
  out.push_back({"block-scheme", ok, ok ? "all structural checks pass" : detail});

  const NonAutonomousIFS sys = assemble(o.sigma, scheme, AdmissibilityPolicy::kRepairFirstWindow);
  const Validation& v = sys.validation();
  out.push_back({"open-set", v.open_set, v.open_set_detail});
  const bool subexp = std::all_of(v.subexp.begin(), v.subexp.end(), [](const SubexpEntry& e) { return e.pass; });
  out.push_back({"subexponential", subexp, std::to_string(v.subexp.size()) + " windows"});

  const std::uint64_t depth = std::min<std::uint64_t>(sys.levels(), 400);
  std::set<std::uint64_t> excepted;
  for (const ContainmentException& e : v.containment_exceptions) excepted.insert(e.level);
  for (std::uint64_t seed = o.seed; seed < o.seed + 100; ++seed) {
    const SampledAddress a = sample_address(sys, seed, depth);
    for (std::uint64_t n = 1; n <= depth; ++n) {
      const Digit d = a.digits[n - 1];
      if (!o.b->contains(Integer(d)) || (d > (*o.f)(n) && !excepted.count(n))) {
        out.push_back({"containment", false, "seed " + std::to_string(seed) + " level " + std::to_string(n)});
        return;
      }
    }
  }
  out.push_back({"containment", true,
                 "100 sampled addresses to depth " + std::to_string(depth) + " stay in B and under f" +
                     (excepted.empty() ? "" : " (repaired levels reported separately)")});
}

}  // namespace

std::vector<InvariantResult> run_invariants(const InvariantOptions& o) {
  std::vector<InvariantResult> out;
  const auto guarded = [&](const char* name, auto fn) {
    try {
      out.push_back(fn());
    } catch (const Error& e) {
      out.push_back({name, false, e.what()});
    }
  };
  guarded("generator-images", generator_images);
  guarded("backward-identity", backward_identity);
  guarded("expansion-round-trip", [&] { return expansion_round_trip(o.sigma, o.seed, o.depth); });
  guarded("interior-disjoint", [&] { return interior_disjoint(o.sigma); });
  guarded("contraction", contraction);
  guarded("distortion", [&] { return distortion(o.seed); });
  if (o.b && o.f) {
    try {
      scheme_checks(o, out);
    } catch (const Error& e) {
      out.push_back({"block-scheme", false, e.what()});
    }
  }
  return out;
}

}  // namespace srcf
