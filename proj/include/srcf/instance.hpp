#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "srcf/digit_set.hpp"
#include "srcf/expansion.hpp"
#include "srcf/sign_sequence.hpp"

namespace srcf {

inline constexpr const char* kInstanceSchema = "srcf-instance/1";

// One problem document. Every field is optional; commands check for what they need.
struct ProblemInstance {
  std::optional<SignSequence> sigma;
  std::optional<DigitSet> b;
  std::optional<GrowthFunction> f;
  std::optional<NumberInput> x;
  std::optional<std::vector<Digit>> digits;
  std::optional<std::vector<Sign>> signs;
  std::optional<Rational> point;
  std::optional<std::uint64_t> depth;
  std::optional<std::uint64_t> seed;
  std::optional<long double> tolerance;
  std::optional<long double> epsilon;
  std::optional<long double> delta;
  std::optional<std::vector<long double>> epsilons;
  std::optional<long double> s;
  std::optional<std::vector<std::uint64_t>> depths;
  std::optional<std::string> mode;  // "exact" | "factorized"
  std::optional<std::size_t> horizon;
  std::optional<std::vector<Digit>> alphabet;
  std::optional<unsigned> precision_bits;
  std::optional<std::size_t> audit_depth;
  std::optional<std::size_t> audit_width;

  // Canonical form: sorted keys, exact integers and rationals as strings.
  nlohmann::json to_json() const;
  // FNV-1a 64 of the canonical dump, as 16 hex digits.
  std::string hash() const;
};

// Rejects unknown fields; syntax errors carry line and column.
ProblemInstance parse_instance(std::string_view text);
ProblemInstance instance_from_json(const nlohmann::json& j);

nlohmann::json number_input_to_json(const NumberInput& x);
NumberInput number_input_from_json(const nlohmann::json& j);

}  // namespace srcf
