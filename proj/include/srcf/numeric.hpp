#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace srcf {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Partial quotients and digit-set elements.
using Digit = std::uint64_t;

enum class Sign : std::int8_t { kMinus = -1, kPlus = 1 };

constexpr int value(Sign s) { return static_cast<int>(s); }
Sign sign_from_int(long v);
char sign_char(Sign s);

// Natural log of |v|; -inf for zero. Works for integers far beyond long double range.
long double log_abs(const Integer& v);
long double log_abs(const Rational& v);
long double to_long_double(const Rational& v);

// Floor division with the quotient rounded toward -inf.
Integer floor_div(const Integer& a, const Integer& b);
Integer floor_of(const Rational& v);
Integer ceil_of(const Rational& v);

// Accepts "p", "p/q", or a decimal literal such as "0.618", "-1.5e-3".
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& v);
std::string to_string(const Integer& v);

// Fixed-width scientific/decimal formatting with explicit precision.
std::string format_real(long double v, int digits = 12);
std::string format_bracket(long double lo, long double hi, int digits = 12);

// Neumaier-compensated accumulator.
class CompensatedSum {
 public:
  void add(long double x) {
    const long double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  void add(const CompensatedSum& other) {
    add(other.sum_);
    add(other.carry_);
  }
  long double value() const { return sum_ + carry_; }

 private:
  long double sum_ = 0;
  long double carry_ = 0;
};

// log(exp(a) + exp(b)) without overflow.
long double log_add(long double a, long double b);

}  // namespace srcf
