#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "srcf/numeric.hpp"

namespace srcf {

// Two-sided enclosure of a (possibly divergent) series; hi is +inf when divergent.
struct SeriesBracket {
  long double lo = 0;
  long double hi = 0;
};

// Infinite (or explicitly finite) subset of N = {1, 2, ...}, enumerated increasingly.
class DigitSet {
 public:
  static DigitSet naturals();
  // {k^b : k >= 1}
  static DigitSet powers(unsigned exponent);
  // {c r^k : k >= 0}
  static DigitSet geometric(Digit c, Digit r);
  // {c_0 + c_1 k + ... + c_d k^d : k >= 1}; coefficients ascending, nonnegative, c_d > 0.
  static DigitSet polynomial(std::vector<Digit> coefficients);
  static DigitSet primes();
  static DigitSet finite(std::vector<Digit> elements);
  // Explicit head followed by the elements of `tail` above max(head).
  static DigitSet with_tail(std::vector<Digit> head, DigitSet tail);

  bool is_finite() const;
  Digit min() const;
  bool contains(const Integer& k) const;
  // Smallest element >= x; nullopt when there is none (or it does not fit 64 bits).
  std::optional<Digit> next(Digit x) const;
  std::optional<Integer> next(const Integer& x) const;
  // Elements in [lo, hi).
  std::vector<Digit> elements(Digit lo, Digit hi) const;
  std::uint64_t count(Digit lo, Digit hi) const;
  // First `count` elements >= from.
  std::vector<Integer> elements_from(const Integer& from, std::size_t count) const;

  // Bracket for sum over k in B, k >= from, of k^{-s}: exact leading terms plus an
  // integral/geometric tail bound for the set's kind.
  SeriesBracket tail_sum(long double s, const Integer& from) const;
  // tau(B) when known in closed form.
  std::optional<Rational> tau_closed_form() const;

  nlohmann::json to_json() const;
  static DigitSet from_json(const nlohmann::json& j);
  std::string describe() const;

 private:
  struct Naturals {};
  struct Powers {
    unsigned exponent;
  };
  struct Geometric {
    Digit c, r;
  };
  struct Polynomial {
    std::vector<Digit> coefficients;
  };
  struct Primes {};
  struct Explicit {
    std::vector<Digit> head;
    std::shared_ptr<const DigitSet> tail;  // null for a finite set
  };
  using Kind = std::variant<Naturals, Powers, Geometric, Polynomial, Primes, Explicit>;

  explicit DigitSet(Kind k) : kind_(std::move(k)) {}

  // Index-parametrized kinds: the k-th element and the least index whose element is >= x.
  Integer element_at(const Integer& index) const;
  Integer index_at_least(const Integer& x) const;
  // Analytic bracket for sum over indices >= index (index kinds) or values >= index (primes).
  SeriesBracket analytic_tail(long double s, const Integer& index) const;

  Kind kind_;
};

// f: N -> N, nondecreasing from monotone_from() on and tending to infinity.
class GrowthFunction {
 public:
  // ceil(c n^p)
  static GrowthFunction power(long double c, long double p);
  // ceil(c r^n)
  static GrowthFunction exponential(long double c, long double r);
  // values[n-1] for n <= values.size(), then the tail rule (power or exponential).
  static GrowthFunction table(std::vector<Digit> values, GrowthFunction tail);

  // Saturates at the largest Digit.
  Digit operator()(std::uint64_t n) const;
  std::uint64_t monotone_from() const { return monotone_from_; }
  // Least N with f(n) >= b for every n >= N; throws HorizonTooSmall past scan_limit.
  std::uint64_t first_index_at_least(Digit b, std::uint64_t scan_limit = std::uint64_t{1} << 62) const;

  nlohmann::json to_json() const;
  static GrowthFunction from_json(const nlohmann::json& j);
  std::string describe() const;

 private:
  struct Rule {
    bool exponential = false;
    long double c = 1;
    long double e = 1;  // p for power, r for exponential
    Digit eval(std::uint64_t n) const;
  };
  GrowthFunction(Rule tail, std::vector<Digit> table);

  Rule tail_;
  std::vector<Digit> table_;
  std::uint64_t monotone_from_ = 1;
};

enum class TauMethod { kClosedForm, kPartialSumTailBound };
const char* to_string(TauMethod m);

struct TauEstimate {
  long double lower = 0;
  long double upper = 0;
  TauMethod method = TauMethod::kClosedForm;
  std::optional<Rational> exact;
  std::string warning;
};

// Closed form when available; otherwise bisection on s with the set's tail bounds.
TauEstimate tau(const DigitSet& b, long double tolerance = 1e-9);
// Always takes the bisection route (used to cross-check closed forms).
TauEstimate tau_numeric(const DigitSet& b, long double tolerance = 1e-9);

}  // namespace srcf
