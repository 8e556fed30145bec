#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "srcf/numeric.hpp"

namespace srcf {

// sigma = (sigma_n), indexed from 1. Random access is O(1) for every kind.
class SignSequence {
 public:
  static SignSequence constant(Sign s);
  // preperiod first, then pattern repeated forever.
  static SignSequence periodic(std::vector<Sign> pattern, std::vector<Sign> preperiod = {});
  static SignSequence explicit_prefix(std::vector<Sign> prefix, Sign tail);
  // sigma_n = +1 with probability p_plus, drawn from a counter-based hash of (seed, n).
  static SignSequence seeded_random(double p_plus, std::uint64_t seed);

  Sign operator[](std::uint64_t n) const;
  std::vector<Sign> prefix(std::uint64_t n) const;
  // Number of +1 entries among sigma_first..sigma_last (inclusive, 1-based).
  std::uint64_t count_plus(std::uint64_t first, std::uint64_t last) const;
  bool is_constant() const;
  // True when every entry is +1 (the RCF case).
  bool all_plus() const;

  nlohmann::json to_json() const;
  static SignSequence from_json(const nlohmann::json& j);
  std::string describe() const;

 private:
  struct Constant {
    Sign sign;
  };
  struct Periodic {
    std::vector<Sign> pattern;
    std::vector<Sign> preperiod;
  };
  struct Prefix {
    std::vector<Sign> prefix;
    Sign tail;
  };
  struct Random {
    double p_plus;
    std::uint64_t seed;
  };
  using Kind = std::variant<Constant, Periodic, Prefix, Random>;

  explicit SignSequence(Kind kind) : kind_(std::move(kind)) {}

  Kind kind_;
};

}  // namespace srcf
