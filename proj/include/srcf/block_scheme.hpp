#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "srcf/digit_set.hpp"

namespace srcf {

// The digit blocks and level windows of the lower-bound construction.
//   b_1 = min B, b_{m+1} = least element of B above b_m with
//        sum_{k in B, b_m <= k < b_{m+1}} k^{-(tau - eps)} >= 1
//   B_1 = {min B}, B_m = B n [b_m, b_{m+1}) for m >= 2
//   levels T_{m-1}+1 .. T_m (T_m = t_1 + ... + t_m) use block m.
class BlockScheme {
 public:
  const DigitSet& set() const { return set_; }
  const GrowthFunction& growth() const { return f_; }
  long double epsilon() const { return epsilon_; }
  const TauEstimate& tau() const { return tau_; }
  // tau - eps, with tau's lower end when only a bracket is known.
  long double exponent() const { return exponent_; }
  std::size_t horizon() const { return t_.size(); }

  // b_1 .. b_{M+2}, 1-based accessors.
  const std::vector<Digit>& b() const { return b_; }
  Digit b(std::size_t m) const { return b_.at(m - 1); }
  const std::vector<std::uint64_t>& t() const { return t_; }
  std::uint64_t t(std::size_t m) const { return t_.at(m - 1); }
  // T_m; T_0 = 0.
  std::uint64_t window_end(std::size_t m) const { return m == 0 ? 0 : window_end_.at(m - 1); }
  std::uint64_t levels() const { return window_end(horizon()); }

  // Blocks 1 .. M+1 are available.
  std::size_t blocks() const { return sizes_.size(); }
  std::uint64_t block_size(std::size_t m) const { return sizes_.at(m - 1); }
  std::vector<Digit> block(std::size_t m) const;
  Digit block_min(std::size_t m) const { return b(m); }
  Digit block_max(std::size_t m) const;
  // sum_{k in B_m} k^{-(tau - eps)} (>= 1 for m >= 2).
  long double block_sum(std::size_t m) const { return sums_.at(m - 1); }

  // Elements of B strictly between b_1 and b_2; they belong to no block.
  std::uint64_t uncovered_count() const { return uncovered_count_; }
  const std::vector<Digit>& uncovered_sample() const { return uncovered_sample_; }

  nlohmann::json to_json() const;
  // Rebuilds from the recorded inputs and checks the stored b and t agree.
  static BlockScheme from_json(const nlohmann::json& j);

  friend BlockScheme build_blocks(const DigitSet&, const GrowthFunction&, long double, std::size_t);

 private:
  BlockScheme(DigitSet set, GrowthFunction f) : set_(std::move(set)), f_(std::move(f)) {}

  DigitSet set_;
  GrowthFunction f_;
  long double epsilon_ = 0;
  TauEstimate tau_;
  long double exponent_ = 0;
  std::vector<Digit> b_;
  std::vector<std::uint64_t> t_;
  std::vector<std::uint64_t> window_end_;
  std::vector<std::uint64_t> sizes_;
  std::vector<long double> sums_;
  std::uint64_t uncovered_count_ = 0;
  std::vector<Digit> uncovered_sample_;
};

// t-rule: T_m is the least value with T_m > T_{m-1}, every level of window m+1 at or past
// the index where f stays >= b_{m+2}, and m log #B_m <= T_m, (m+1) log #B_{m+1} <= T_m + 1.
BlockScheme build_blocks(const DigitSet& set, const GrowthFunction& f, long double epsilon,
                         std::size_t horizon);

struct LevelSlot {
  std::size_t block;   // m
  std::uint64_t offset;  // l_n = n - T_{m-1}
};
LevelSlot alphabet_layout(const BlockScheme& scheme, std::uint64_t n);

struct SchemeCheck {
  std::string name;
  bool pass;
  std::string detail;
};
// Re-derives each structural property of a built scheme by direct evaluation.
std::vector<SchemeCheck> verify_scheme(const BlockScheme& scheme);

}  // namespace srcf
