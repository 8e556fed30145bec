#include "srcf/expansion.hpp"

#include <limits>

#include "srcf/error.hpp"

namespace srcf {

using boost::multiprecision::abs;
using boost::multiprecision::gcd;

namespace {

Integer isqrt(const Integer& n) { return boost::multiprecision::sqrt(n); }

bool is_square(const Integer& n) {
  const Integer s = isqrt(n);
  return s * s == n;
}

// floor((p + q sqrt(d)) / r) for r > 0, q != 0, d not a square.
Integer surd_floor(const Integer& p, const Integer& q, const Integer& r, const Integer& d) {
  const Integer s = isqrt(q * q * d);
  const Integer numerator_floor = q > 0 ? Integer(p + s) : Integer(p - s - 1);
  return floor_div(numerator_floor, r);
}

Digit to_digit(const Integer& v) {
  if (v < 1 || v > Integer(std::numeric_limits<Digit>::max())) {
    throw Error(ErrorCode::kOverflow, "partial quotient " + v.str() + " does not fit a 64-bit digit");
  }
  return v.convert_to<Digit>();
}

Rational round_down(const Rational& x, unsigned bits) {
  const Integer scale = Integer(1) << bits;
  return Rational(floor_of(x * scale), scale);
}

Rational round_up(const Rational& x, unsigned bits) {
  const Integer scale = Integer(1) << bits;
  return Rational(ceil_of(x * scale), scale);
}

}  // namespace

const char* to_string(ExpansionStatus s) {
  switch (s) {
    case ExpansionStatus::kComplete: return "complete";
    case ExpansionStatus::kRationalTermination: return "RationalTermination";
    case ExpansionStatus::kUncertifiedDigit: return "UncertifiedDigit";
    case ExpansionStatus::kEnclosureTooWide: return "EnclosureTooWide";
  }
  return "unknown";
}

NumberInput NumberInput::rational(Rational x) {
  if (!(x > 0 && x < 1)) throw Error(ErrorCode::kInvalidArgument, "input must lie in (0, 1)");
  return NumberInput(std::move(x));
}

NumberInput NumberInput::surd(Integer p, Integer q, Integer r, Integer d) {
  if (r == 0) throw Error(ErrorCode::kInvalidArgument, "surd denominator is zero");
  if (q == 0 || d <= 0 || is_square(d)) {
    throw Error(ErrorCode::kInvalidArgument, "surd needs q != 0 and D > 0 not a perfect square");
  }
  if (r < 0) {
    p = -p;
    q = -q;
    r = -r;
  }
  const Integer fl = surd_floor(p, q, r, d);
  if (fl != 0) throw Error(ErrorCode::kInvalidArgument, "surd value must lie in (0, 1)");
  return NumberInput(QuadraticSurd{std::move(p), std::move(q), std::move(r), std::move(d)});
}

NumberInput NumberInput::decimal(Rational value, Rational radius) {
  if (!(value > 0 && value < 1)) throw Error(ErrorCode::kInvalidArgument, "input must lie in (0, 1)");
  if (radius < 0) throw Error(ErrorCode::kInvalidArgument, "error radius must be nonnegative");
  if (radius == 0) return NumberInput(std::move(value));
  return NumberInput(DecimalInput{std::move(value), std::move(radius)});
}

long double NumberInput::approx() const {
  if (const auto* r = std::get_if<Rational>(&kind_)) return to_long_double(*r);
  if (const auto* s = std::get_if<QuadraticSurd>(&kind_)) {
    return (s->p.convert_to<long double>() + s->q.convert_to<long double>() *
                                                 std::sqrt(s->d.convert_to<long double>())) /
           s->r.convert_to<long double>();
  }
  return to_long_double(std::get<DecimalInput>(kind_).value);
}

std::string NumberInput::describe() const {
  if (const auto* r = std::get_if<Rational>(&kind_)) return "rational " + to_string(*r);
  if (const auto* s = std::get_if<QuadraticSurd>(&kind_)) {
    return "surd (" + s->p.str() + " + " + s->q.str() + "*sqrt(" + s->d.str() + "))/" + s->r.str();
  }
  const auto& d = std::get<DecimalInput>(kind_);
  return "decimal " + to_string(d.value) + " +- " + to_string(d.radius);
}

RationalInterval Expansion::enclosure() const {
  if (digits.empty()) return unit_interval();
  return fundamental_interval(signs, digits);
}

DigitStream::DigitStream(const NumberInput& x, SignSequence sigma, unsigned precision_bits)
    : sigma_(std::move(sigma)), precision_bits_(precision_bits) {
  const auto& k = x.kind();
  if (const auto* r = std::get_if<Rational>(&k)) {
    remainder_ = *r;
    exact_value_ = *r;
    rational_input_ = true;
  } else if (const auto* s = std::get_if<QuadraticSurd>(&k)) {
    remainder_ = SurdState{s->p, s->q, s->r, s->d};
  } else {
    const auto& d = std::get<DecimalInput>(k);
    remainder_ = IntervalState{d.value - d.radius, d.value + d.radius, false};
  }
}

DigitStream::DigitStream(RationalInterval open_enclosure, SignSequence sigma)
    : sigma_(std::move(sigma)), precision_bits_(0) {
  remainder_ = IntervalState{std::move(open_enclosure.lo), std::move(open_enclosure.hi), true};
}

std::optional<Digit> DigitStream::next() {
  if (finished_) return std::nullopt;
  const Sign s = sigma_[digits_.size() + 1];
  std::optional<Digit> a;
  if (std::holds_alternative<Rational>(remainder_)) {
    a = step_rational(s);
  } else if (std::holds_alternative<SurdState>(remainder_)) {
    a = step_surd(s);
  } else {
    a = step_interval(s);
  }
  if (a) {
    digits_.push_back(*a);
    signs_.push_back(s);
  }
  return a;
}

std::optional<Digit> DigitStream::step_rational(Sign s) {
  Rational& r = std::get<Rational>(remainder_);
  const Rational inv = 1 / r;
  const Integer k = floor_of(inv);
  Integer a = s == Sign::kPlus ? k : Integer(k + 1);
  r = s == Sign::kPlus ? Rational(inv - k) : Rational(Rational(a) - inv);
  if (r == 0) {
    finished_ = true;
    status_ = ExpansionStatus::kRationalTermination;
  }
  return to_digit(a);
}

std::optional<Digit> DigitStream::step_surd(Sign s) {
  auto& st = std::get<SurdState>(remainder_);
  // 1/r = R (P - Q sqrt D) / (P^2 - Q^2 D)
  Integer p = st.r * st.p;
  Integer q = -st.r * st.q;
  Integer r = st.p * st.p - st.q * st.q * st.d;
  if (r < 0) {
    p = -p;
    q = -q;
    r = -r;
  }
  const Integer k = surd_floor(p, q, r, st.d);
  const Integer a = s == Sign::kPlus ? k : Integer(k + 1);
  if (s == Sign::kPlus) {
    p -= k * r;
  } else {
    p = a * r - p;
    q = -q;
  }
  const Integer g = gcd(gcd(abs(p), abs(q)), r);
  if (g > 1) {
    p /= g;
    q /= g;
    r /= g;
  }
  st.p = std::move(p);
  st.q = std::move(q);
  st.r = std::move(r);
  return to_digit(a);
}

std::optional<Digit> DigitStream::step_interval(Sign s) {
  auto& st = std::get<IntervalState>(remainder_);
  if (st.lo <= 0) {
    finished_ = true;
    status_ = st.open ? ExpansionStatus::kEnclosureTooWide : ExpansionStatus::kUncertifiedDigit;
    return std::nullopt;
  }
  const Rational inv_hi = 1 / st.hi;
  const Rational inv_lo = 1 / st.lo;
  const Integer k = floor_of(inv_hi);
  // every point must share floor(1/r) (closed) or lie in one branch (open)
  const bool certified = st.open ? inv_lo <= Rational(k + 1) : inv_lo < Rational(k + 1);
  if (!certified || k < 1) {
    finished_ = true;
    status_ = st.open ? ExpansionStatus::kEnclosureTooWide : ExpansionStatus::kUncertifiedDigit;
    return std::nullopt;
  }
  const Integer a = s == Sign::kPlus ? k : Integer(k + 1);
  Rational lo, hi;
  if (s == Sign::kPlus) {
    lo = inv_hi - k;
    hi = inv_lo - k;
  } else {
    lo = Rational(a) - inv_lo;
    hi = Rational(a) - inv_hi;
  }
  if (!st.open && precision_bits_ > 0) {
    lo = round_down(lo, precision_bits_);
    hi = round_up(hi, precision_bits_);
  }
  st.lo = std::move(lo);
  st.hi = std::move(hi);
  return to_digit(a);
}

Expansion expand(const NumberInput& x, const SignSequence& sigma, std::size_t depth,
                 unsigned precision_bits) {
  DigitStream stream(x, sigma, precision_bits);
  while (stream.digits().size() < depth && stream.next()) {
  }
  Expansion e;
  e.signs = stream.signs();
  e.digits = stream.digits();
  e.exact_value = stream.exact_value();
  e.rational_input = stream.rational_input();
  e.status = stream.finished() ? stream.status() : ExpansionStatus::kComplete;
  return e;
}

Rational evaluate(std::span<const Sign> signs, std::span<const Digit> digits, const Rational& point) {
  if (point < 0 || point > 1) throw Error(ErrorCode::kInvalidArgument, "evaluation point must lie in [0, 1]");
  return compose_word(signs, digits)(point);
}

Expansion reconvert(const Expansion& source, const SignSequence& target_sigma, std::size_t depth) {
  if (source.exact_value) {
    Expansion e = expand(NumberInput::rational(*source.exact_value), target_sigma, depth);
    return e;
  }
  DigitStream stream(source.enclosure(), target_sigma);
  while (stream.digits().size() < depth && stream.next()) {
  }
  Expansion e;
  e.signs = stream.signs();
  e.digits = stream.digits();
  e.status = stream.finished() ? stream.status() : ExpansionStatus::kComplete;
  return e;
}

RationalInterval singleton_check(std::span<const Sign> signs, std::span<const Digit> digits,
                                 std::size_t depth) {
  if (depth > digits.size() || depth > signs.size()) {
    throw Error(ErrorCode::kInvalidArgument, "depth exceeds the word length");
  }
  return fundamental_interval(signs.first(depth), digits.first(depth));
}

std::vector<Rational> nested_lengths(std::span<const Sign> signs, std::span<const Digit> digits) {
  if (signs.size() != digits.size()) {
    throw Error(ErrorCode::kInvalidArgument, "sign and digit lists differ in length");
  }
  std::vector<Rational> out;
  out.reserve(digits.size());
  MobiusMap m;
  for (std::size_t k = 0; k < digits.size(); ++k) {
    m = compose(m, generator(signs[k], digits[k]));
    out.push_back(fundamental_length(m));
  }
  return out;
}

}  // namespace srcf
