#pragma once

#include <optional>
#include <string>
#include <vector>

#include "srcf/digit_set.hpp"
#include "srcf/parallel.hpp"
#include "srcf/sign_sequence.hpp"

namespace srcf {

struct InvariantResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct InvariantOptions {
  SignSequence sigma = SignSequence::periodic({Sign::kPlus, Sign::kMinus});
  std::uint64_t seed = 1;
  std::size_t depth = 40;
  std::optional<DigitSet> b;
  std::optional<GrowthFunction> f;
  long double epsilon = 0.1L;
  std::size_t horizon = 5;
  ExecutionOptions exec;
};

// Structural checks at modest sizes: generator images, the backward identity
// (2,...,2) -> n/(n+1), expansion round trips, interior disjointness, contraction and
// distortion on the extension domain, and (when B and f are given) the block scheme,
// assembly and sampled-address containment.
std::vector<InvariantResult> run_invariants(const InvariantOptions& options);

}  // namespace srcf
