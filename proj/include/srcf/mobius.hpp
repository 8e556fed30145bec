#pragma once

#include <optional>
#include <span>
#include <string>

#include "srcf/numeric.hpp"

namespace srcf {

// x -> (a x + b) / (c x + d) with exact integer coefficients.
class MobiusMap {
 public:
  MobiusMap() : a_(1), b_(0), c_(0), d_(1) {}
  MobiusMap(Integer a, Integer b, Integer c, Integer d)
      : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(std::move(d)) {}

  static MobiusMap identity() { return {}; }

  const Integer& a() const { return a_; }
  const Integer& b() const { return b_; }
  const Integer& c() const { return c_; }
  const Integer& d() const { return d_; }

  Integer det() const { return a_ * d_ - b_ * c_; }
  Rational operator()(const Rational& x) const;

  friend bool operator==(const MobiusMap&, const MobiusMap&) = default;

  std::string str() const;

 private:
  Integer a_, b_, c_, d_;
};

// left o right, i.e. the matrix product left * right.
MobiusMap compose(const MobiusMap& left, const MobiusMap& right);
inline MobiusMap operator*(const MobiusMap& left, const MobiusMap& right) {
  return compose(left, right);
}

struct RationalInterval {
  Rational lo;
  Rational hi;

  Rational length() const { return hi - lo; }
  bool contains(const Rational& x) const { return lo <= x && x <= hi; }
  bool contains_interior(const Rational& x) const { return lo < x && x < hi; }
  bool contains(const RationalInterval& other) const {
    return lo <= other.lo && other.hi <= hi;
  }
  bool interior_disjoint(const RationalInterval& other) const {
    return hi <= other.lo || other.hi <= lo;
  }
  Rational midpoint() const { return (lo + hi) / 2; }
  std::string str() const;

  friend bool operator==(const RationalInterval&, const RationalInterval&) = default;
};

// X = [0, 1] and the extension domain (-1/5, 5/4) used for distortion estimates.
const RationalInterval& unit_interval();
const RationalInterval& extension_domain();

// sigma + digit >= 1.
bool admissible(Sign sign, Digit digit);
bool admissible(Sign sign, const Integer& digit);

// phi_{+1,i}(x) = 1/(i + x) and phi_{-1,i}(x) = 1/(i - x).
MobiusMap generator(Sign sign, Digit digit);
MobiusMap generator(Sign sign, const Integer& digit);

// phi_{s1,a1} o ... o phi_{sn,an}; throws on length mismatch or inadmissible letters.
MobiusMap compose_word(std::span<const Sign> signs, std::span<const Digit> digits);

// Image of [0, 1] under the composed word.
RationalInterval fundamental_interval(std::span<const Sign> signs, std::span<const Digit> digits);
RationalInterval fundamental_interval(const MobiusMap& map);
// |det| / |d (c + d)|; equals the length of fundamental_interval(map).
Rational fundamental_length(const MobiusMap& map);

// Image of a closed interval; the map must have no pole on it.
RationalInterval image(const MobiusMap& map, const RationalInterval& domain);

// Scaling factor |det| / (c x + d)^2 bounds over a closed interval (endpoints of an
// open domain are used as limits).
struct DerivativeBounds {
  Rational sup;
  Rational inf;
};
DerivativeBounds derivative_bounds(const MobiusMap& map, const RationalInterval& domain);

// sup/inf over X and sup over the extension domain, when the map is pole-free there.
struct ScalingProfile {
  Rational sup_x;
  Rational inf_x;
  std::optional<Rational> sup_xtilde;
};
ScalingProfile scaling_profile(const MobiusMap& map);

// Bounded distortion constant for generators with digits >= min_digit on the extension
// domain: C = exp(2 C0 |X~|), where C0 bounds |(log|D phi|)'|.
struct DistortionConstant {
  Digit min_digit = 3;
  Rational c0;
  Rational log_value;  // 2 * c0 * |X~|
  long double value() const;
};
DistortionConstant distortion_constant(Digit min_digit);
DistortionConstant distortion_constant(const Integer& min_digit);

}  // namespace srcf
