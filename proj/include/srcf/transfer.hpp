#pragma once

#include <cstddef>

#include <nlohmann/json.hpp>

#include "srcf/ifs.hpp"

namespace srcf {

// Leading eigenvalue of g -> sum_i |D phi_i|^s g(phi_i) on [0, 1], by collocation at
// Chebyshev-Lobatto nodes. Autonomous systems only.
struct TransferEstimate {
  long double s = 0;
  long double lambda = 0;
  std::size_t degree = 0;
  long double shift = 0;  // |lambda(degree) - lambda(degree / 2)|
  bool converged = false;
};

// Doubles the degree from min_degree until the eigenvalue moves by less than shift_tolerance.
TransferEstimate transfer_refine(const NonAutonomousIFS& system, long double s, std::size_t min_degree = 8,
                                 std::size_t max_degree = 256, long double shift_tolerance = 1e-10L);
// Eigenvalue at one fixed degree.
long double transfer_eigenvalue(const NonAutonomousIFS& system, long double s, std::size_t degree);

struct TransferRoot {
  long double s = 0;  // root of log lambda(s) = 0
  long double lo = 0;
  long double hi = 0;
  std::size_t degree = 0;
  nlohmann::json to_json() const;
};
// Bisection on log lambda(s) with the refined eigenvalue; fixed_degree > 0 skips refinement.
TransferRoot transfer_dimension(const NonAutonomousIFS& system, long double tolerance = 1e-12L,
                                std::size_t min_degree = 8, std::size_t fixed_degree = 0);

}  // namespace srcf
