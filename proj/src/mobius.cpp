#include "srcf/mobius.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "srcf/error.hpp"

namespace srcf {

using boost::multiprecision::abs;

Rational MobiusMap::operator()(const Rational& x) const {
  const Rational den = Rational(c_) * x + Rational(d_);
  if (den == 0) {
    throw Error(ErrorCode::kNotConformal, "pole of " + str() + " at x = " + to_string(x));
  }
  return (Rational(a_) * x + Rational(b_)) / den;
}

std::string MobiusMap::str() const {
  return "(" + a_.str() + "," + b_.str() + ";" + c_.str() + "," + d_.str() + ")";
}

MobiusMap compose(const MobiusMap& l, const MobiusMap& r) {
  return MobiusMap(l.a() * r.a() + l.b() * r.c(), l.a() * r.b() + l.b() * r.d(),
                   l.c() * r.a() + l.d() * r.c(), l.c() * r.b() + l.d() * r.d());
}

std::string RationalInterval::str() const {
  return "[" + to_string(lo) + ", " + to_string(hi) + "]";
}

const RationalInterval& unit_interval() {
  static const RationalInterval x{Rational(0), Rational(1)};
  return x;
}

const RationalInterval& extension_domain() {
  static const RationalInterval x{Rational(-1, 5), Rational(5, 4)};
  return x;
}

bool admissible(Sign sign, Digit digit) {
  return digit >= 1 && !(sign == Sign::kMinus && digit == 1);
}

bool admissible(Sign sign, const Integer& digit) { return digit >= 1 && digit + value(sign) >= 1; }

MobiusMap generator(Sign sign, const Integer& digit) {
  if (!admissible(sign, digit)) {
    throw Error(ErrorCode::kInadmissible, std::string("inadmissible letter (") + sign_char(sign) +
                                              "1, " + digit.str() + "): need sign + digit >= 1");
  }
  return MobiusMap(0, 1, value(sign), digit);
}

MobiusMap generator(Sign sign, Digit digit) { return generator(sign, Integer(digit)); }

MobiusMap compose_word(std::span<const Sign> signs, std::span<const Digit> digits) {
  if (signs.size() != digits.size()) {
    throw Error(ErrorCode::kInvalidArgument, "sign and digit lists differ in length");
  }
  MobiusMap m;
  for (std::size_t k = 0; k < digits.size(); ++k) {
    if (!admissible(signs[k], digits[k])) {
      throw Error(ErrorCode::kInadmissible,
                  "inadmissible letter at position " + std::to_string(k + 1), k + 1);
    }
    m = compose(m, generator(signs[k], digits[k]));
  }
  return m;
}

RationalInterval fundamental_interval(const MobiusMap& map) { return image(map, unit_interval()); }

RationalInterval fundamental_interval(std::span<const Sign> signs, std::span<const Digit> digits) {
  return fundamental_interval(compose_word(signs, digits));
}

Rational fundamental_length(const MobiusMap& m) {
  return Rational(abs(m.det()), abs(m.d() * (m.c() + m.d())));
}

namespace {

// Values of c x + d at the two endpoints; throws when the linear form vanishes on [lo, hi].
std::pair<Rational, Rational> checked_denominators(const MobiusMap& m, const RationalInterval& dom) {
  Rational at_lo = Rational(m.c()) * dom.lo + Rational(m.d());
  Rational at_hi = Rational(m.c()) * dom.hi + Rational(m.d());
  if (at_lo == 0 || at_hi == 0 || (at_lo > 0) != (at_hi > 0)) {
    throw Error(ErrorCode::kNotConformal, "map " + m.str() + " has a pole on " + dom.str());
  }
  return {std::move(at_lo), std::move(at_hi)};
}

}  // namespace

RationalInterval image(const MobiusMap& m, const RationalInterval& dom) {
  checked_denominators(m, dom);
  Rational u = m(dom.lo);
  Rational v = m(dom.hi);
  if (v < u) std::swap(u, v);
  return {std::move(u), std::move(v)};
}

DerivativeBounds derivative_bounds(const MobiusMap& m, const RationalInterval& dom) {
  auto [at_lo, at_hi] = checked_denominators(m, dom);
  at_lo = abs(at_lo);
  at_hi = abs(at_hi);
  const Rational det = abs(Rational(m.det()));
  const Rational& small = std::min(at_lo, at_hi);
  const Rational& large = std::max(at_lo, at_hi);
  return {det / (small * small), det / (large * large)};
}

ScalingProfile scaling_profile(const MobiusMap& m) {
  const DerivativeBounds on_x = derivative_bounds(m, unit_interval());
  ScalingProfile p{on_x.sup, on_x.inf, std::nullopt};
  try {
    p.sup_xtilde = derivative_bounds(m, extension_domain()).sup;
  } catch (const Error&) {
  }
  return p;
}

long double DistortionConstant::value() const { return std::exp(to_long_double(log_value)); }

DistortionConstant distortion_constant(const Integer& min_digit) {
  if (min_digit < 3) {
    throw Error(ErrorCode::kInvalidArgument,
                "bounded distortion constant is only available for digits >= 3");
  }
  const RationalInterval& xt = extension_domain();
  // |(log|D phi_{+1,i}|)'| = 2/(i + x) peaks at x = lo; for phi_{-1,i} it is 2/(i - x),
  // peaking at x = hi. Both decrease in i, so the smallest digit dominates.
  const Rational i(min_digit);
  const Rational plus = Rational(2) / (i + xt.lo);
  const Rational minus = Rational(2) / (i - xt.hi);
  DistortionConstant dc;
  dc.min_digit = min_digit > Integer(std::numeric_limits<Digit>::max())
                     ? std::numeric_limits<Digit>::max()
                     : min_digit.convert_to<Digit>();
  dc.c0 = std::max(plus, minus);
  dc.log_value = 2 * dc.c0 * xt.length();
  return dc;
}

DistortionConstant distortion_constant(Digit min_digit) { return distortion_constant(Integer(min_digit)); }

}  // namespace srcf
