#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "srcf/mobius.hpp"
#include "srcf/numeric.hpp"
#include "srcf/sign_sequence.hpp"

namespace srcf {

// (p + q sqrt(D)) / r with D > 0 not a perfect square and q != 0.
struct QuadraticSurd {
  Integer p, q, r, d;
};

// A decimal value known only up to +-radius.
struct DecimalInput {
  Rational value;
  Rational radius;
};

class NumberInput {
 public:
  static NumberInput rational(Rational x);
  static NumberInput surd(Integer p, Integer q, Integer r, Integer d);
  static NumberInput decimal(Rational value, Rational radius);

  const std::variant<Rational, QuadraticSurd, DecimalInput>& kind() const { return kind_; }
  bool is_exact_rational() const { return std::holds_alternative<Rational>(kind_); }
  // Floating approximation, for reporting only.
  long double approx() const;
  std::string describe() const;

 private:
  explicit NumberInput(std::variant<Rational, QuadraticSurd, DecimalInput> k) : kind_(std::move(k)) {}
  std::variant<Rational, QuadraticSurd, DecimalInput> kind_;
};

enum class ExpansionStatus {
  kComplete,             // produced every requested digit
  kRationalTermination,  // remainder hit 0; the word evaluated at 0 is the input
  kUncertifiedDigit,     // enclosure straddles a branch boundary; supply more precision
  kEnclosureTooWide,     // reconversion ran out of input digits
};
const char* to_string(ExpansionStatus s);

struct Expansion {
  std::vector<Sign> signs;
  std::vector<Digit> digits;
  ExpansionStatus status = ExpansionStatus::kComplete;
  // Set when the expanded point is a known rational (rational inputs, terminated words).
  std::optional<Rational> exact_value;
  // Rational inputs lie outside the irrational setting; flagged in reports.
  bool rational_input = false;

  RationalInterval enclosure() const;
};

// Lazily emits a_{sigma,1}, a_{sigma,2}, ... for x.
//   sigma_k = +1: a_k = floor(1/r), r <- 1/r - a_k
//   sigma_k = -1: a_k = floor(1/r) + 1, r <- a_k - 1/r
class DigitStream {
 public:
  // precision_bits bounds the dyadic grid for outward rounding of decimal enclosures.
  DigitStream(const NumberInput& x, SignSequence sigma, unsigned precision_bits = 256);

  std::optional<Digit> next();
  ExpansionStatus status() const { return status_; }
  bool finished() const { return finished_; }
  const std::vector<Digit>& digits() const { return digits_; }
  const std::vector<Sign>& signs() const { return signs_; }
  const std::optional<Rational>& exact_value() const { return exact_value_; }
  bool rational_input() const { return rational_input_; }

 private:
  struct SurdState {
    Integer p, q, r, d;
  };
  struct IntervalState {
    Rational lo, hi;
    bool open;
  };

  std::optional<Digit> step_rational(Sign s);
  std::optional<Digit> step_surd(Sign s);
  std::optional<Digit> step_interval(Sign s);

  SignSequence sigma_;
  unsigned precision_bits_;
  std::variant<Rational, SurdState, IntervalState> remainder_;
  std::vector<Digit> digits_;
  std::vector<Sign> signs_;
  std::optional<Rational> exact_value_;
  bool rational_input_ = false;
  bool finished_ = false;
  ExpansionStatus status_ = ExpansionStatus::kComplete;

  friend Expansion reconvert(const Expansion&, const SignSequence&, std::size_t);
  DigitStream(RationalInterval open_enclosure, SignSequence sigma);
};

Expansion expand(const NumberInput& x, const SignSequence& sigma, std::size_t depth,
                 unsigned precision_bits = 256);

// phi_{s1,a1} o ... o phi_{sn,an}(point).
Rational evaluate(std::span<const Sign> signs, std::span<const Digit> digits, const Rational& point);

// Re-expands the point enclosed by `source` under target_sigma. Exact values are
// re-expanded exactly; otherwise every digit is certified against the open enclosure.
Expansion reconvert(const Expansion& source, const SignSequence& target_sigma, std::size_t depth);

// Depth-n fundamental interval of the word's prefix.
RationalInterval singleton_check(std::span<const Sign> signs, std::span<const Digit> digits,
                                 std::size_t depth);
// Lengths of the nested fundamental intervals at depths 1..digits.size().
std::vector<Rational> nested_lengths(std::span<const Sign> signs, std::span<const Digit> digits);

}  // namespace srcf
