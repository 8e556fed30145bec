#include "srcf/numeric.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>

#include "srcf/error.hpp"

namespace srcf {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kInadmissible: return "InadmissibleDigit";
    case ErrorCode::kNotConformal: return "NotConformal";
    case ErrorCode::kEnumerationCapExceeded: return "EnumerationCapExceeded";
    case ErrorCode::kEpsilonOutOfRange: return "EpsilonOutOfRange";
    case ErrorCode::kHorizonTooSmall: return "HorizonTooSmall";
    case ErrorCode::kBeyondHorizon: return "BeyondHorizon";
    case ErrorCode::kNonAutonomousInput: return "NonAutonomousInput";
    case ErrorCode::kNoTailBound: return "NoTailBound";
    case ErrorCode::kLSearchExhausted: return "LSearchExhausted";
    case ErrorCode::kSchemeBuildFailure: return "SchemeBuildFailure";
    case ErrorCode::kOverflow: return "Overflow";
    case ErrorCode::kParse: return "ParseError";
  }
  return "Unknown";
}

Sign sign_from_int(long v) {
  if (v == 1) return Sign::kPlus;
  if (v == -1) return Sign::kMinus;
  throw Error(ErrorCode::kInvalidArgument, "sign must be +1 or -1, got " + std::to_string(v));
}

char sign_char(Sign s) { return s == Sign::kPlus ? '+' : '-'; }

long double log_abs(const Integer& v) {
  if (v == 0) return -std::numeric_limits<long double>::infinity();
  const Integer m = boost::multiprecision::abs(v);
  const std::size_t bits = boost::multiprecision::msb(m) + 1;
  if (bits <= 60) {
    return std::log(static_cast<long double>(m.convert_to<std::uint64_t>()));
  }
  const std::size_t shift = bits - 60;
  const Integer top = m >> shift;
  return std::log(static_cast<long double>(top.convert_to<std::uint64_t>())) +
         static_cast<long double>(shift) * std::log(2.0L);
}

long double log_abs(const Rational& v) {
  return log_abs(boost::multiprecision::numerator(v)) -
         log_abs(boost::multiprecision::denominator(v));
}

long double to_long_double(const Rational& v) {
  if (v == 0) return 0;
  const long double mag = std::exp(log_abs(v));
  return v < 0 ? -mag : mag;
}

Integer floor_div(const Integer& a, const Integer& b) {
  if (b == 0) throw Error(ErrorCode::kInvalidArgument, "division by zero");
  Integer q = a / b;  // truncates toward zero
  Integer r = a - q * b;
  if (r != 0 && ((r < 0) != (b < 0))) q -= 1;
  return q;
}

Integer floor_of(const Rational& v) {
  return floor_div(boost::multiprecision::numerator(v), boost::multiprecision::denominator(v));
}

Integer ceil_of(const Rational& v) { return -floor_of(-v); }

namespace {

Integer pow10(unsigned n) {
  Integer r = 1;
  for (unsigned i = 0; i < n; ++i) r *= 10;
  return r;
}

[[noreturn]] void bad_number(std::string_view text) {
  throw Error(ErrorCode::kParse, "malformed number '" + std::string(text) + "'");
}

Integer parse_integer(std::string_view text) {
  if (text.empty()) bad_number(text);
  std::size_t i = 0;
  bool negative = false;
  if (text[0] == '+' || text[0] == '-') {
    negative = text[0] == '-';
    i = 1;
  }
  if (i == text.size()) bad_number(text);
  Integer r = 0;
  for (; i < text.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(text[i]))) bad_number(text);
    r = r * 10 + (text[i] - '0');
  }
  return negative ? Integer(-r) : r;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) bad_number(text);
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    const Integer p = parse_integer(text.substr(0, slash));
    const Integer q = parse_integer(text.substr(slash + 1));
    if (q == 0) bad_number(text);
    return Rational(p, q);
  }
  std::string_view mantissa = text;
  long exponent = 0;
  if (const auto e = text.find_first_of("eE"); e != std::string_view::npos) {
    mantissa = text.substr(0, e);
    const Integer ex = parse_integer(text.substr(e + 1));
    if (boost::multiprecision::abs(ex) > 100000) bad_number(text);
    exponent = ex.convert_to<long>();
  }
  bool negative = false;
  if (!mantissa.empty() && (mantissa[0] == '+' || mantissa[0] == '-')) {
    negative = mantissa[0] == '-';
    mantissa.remove_prefix(1);
  }
  std::string digits;
  long fraction_digits = 0;
  bool seen_point = false;
  for (char ch : mantissa) {
    if (ch == '.') {
      if (seen_point) bad_number(text);
      seen_point = true;
    } else if (std::isdigit(static_cast<unsigned char>(ch))) {
      digits.push_back(ch);
      if (seen_point) ++fraction_digits;
    } else {
      bad_number(text);
    }
  }
  if (digits.empty()) bad_number(text);
  Rational r(parse_integer(digits));
  const long scale = exponent - fraction_digits;
  if (scale > 0) r *= pow10(static_cast<unsigned>(scale));
  if (scale < 0) r /= pow10(static_cast<unsigned>(-scale));
  return negative ? Rational(-r) : r;
}

std::string to_string(const Integer& v) { return v.str(); }

std::string to_string(const Rational& v) {
  const Integer& den = boost::multiprecision::denominator(v);
  if (den == 1) return boost::multiprecision::numerator(v).str();
  return boost::multiprecision::numerator(v).str() + "/" + den.str();
}

std::string format_real(long double v, int digits) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  const long double mag = std::abs(v);
  if (mag != 0 && (mag < 1e-4L || mag >= 1e9L)) {
    std::snprintf(buf, sizeof buf, "%.*Le", digits, v);
  } else {
    std::snprintf(buf, sizeof buf, "%.*Lf", digits, v);
  }
  return buf;
}

std::string format_bracket(long double lo, long double hi, int digits) {
  return "[" + format_real(lo, digits) + ", " + format_real(hi, digits) + "]";
}

long double log_add(long double a, long double b) {
  if (std::isinf(a) && a < 0) return b;
  if (std::isinf(b) && b < 0) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

}  // namespace srcf
