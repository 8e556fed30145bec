#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "srcf/ifs.hpp"
#include "srcf/parallel.hpp"

namespace srcf {

// One scheduled depth of the lower-bound chain.
//   chain(n) = sum_{j <= min(n, T_N)} [-s log C_0 + log sum_{k in I^(j)} k^{-2s}]
//            + sum_{T_N < j <= n} log sum_{k in I^(j)} k^{-(2+delta)s}
// and z_low(n) >= chain(n) >= log F = chain(T_N) is what the certificate needs.
struct DepthCheck {
  std::uint64_t n = 0;
  long double z_low = 0;
  long double chain = 0;
  bool pass = false;
  bool literal_pass = false;  // z_low >= log of C^{-Ns} (min B)^{-2 s t_1} prod_{m=2}^N (...)^{t_m}
};

struct LowerOptions {
  std::size_t horizon = 6;  // first attempt; raised while N does not fit
  std::size_t max_horizon = 16;
  AdmissibilityPolicy policy = AdmissibilityPolicy::kRepairFirstWindow;
  std::vector<std::uint64_t> depths;  // empty: T_N, then the midpoint and end of every later window
  long double relative_tolerance = 1e-12L;
};

struct LowerCertificate {
  long double epsilon = 0;
  long double delta = 0;
  long double tau = 0;  // value used by the scheme (closed form or bracket lower end)
  long double s = 0;    // (tau - eps) / (2 + delta)
  std::shared_ptr<const BlockScheme> scheme;
  std::shared_ptr<const NonAutonomousIFS> system;
  ControlConstants constants;
  Digit min_b = 0;
  std::uint64_t t1 = 0;
  long double log_floor = 0;          // chain(T_N)
  long double log_floor_literal = 0;  // C^{-Ns} form with C = C_0
  std::vector<DepthCheck> depths;
  std::optional<std::uint64_t> first_failure;
  std::uint64_t literal_failures = 0;
  bool certified = false;
  std::string applies_to;  // which set the bound s <= dim holds for
  nlohmann::json to_json() const;
};

LowerCertificate lower_certificate(const DigitSet& b, const GrowthFunction& f, const SignSequence& sigma,
                                   long double epsilon, long double delta, const LowerOptions& options = {});

struct CoverAudit {
  std::uint64_t depth = 0;
  std::uint64_t words = 0;
  long double sum = 0;  // sum of |[a_1..a_n]|^{(tau+eps)/2}
  bool at_most_one = false;
  bool nonincreasing = false;
};

struct UpperOptions {
  std::size_t audit_depth = 4;
  std::size_t audit_width = 6;  // first elements of B at or above L
  ExecutionOptions exec;
};

struct UpperCertificate {
  long double epsilon = 0;
  long double tau = 0;  // closed form or bracket upper end
  long double exponent = 0;
  long double bound = 0;  // (tau + eps) / 2
  Integer l;  // least L with the condition under C for digits >= 3
  DistortionConstant c;  // recomputed for digits >= L
  long double log_condition = 0;  // log of (2C)^{(tau+eps)/2} * tail upper bound at L, with C(L); <= 0
  long double log_condition_below = 0;  // at L - 1 with C(3); > 0 unless L = 3
  Integer l_self_consistent;  // least L passing with C(L) itself
  std::vector<Integer> audit_alphabet;
  std::vector<CoverAudit> covers;
  long double worst_ratio_margin = 0;  // max log(ratio a^2 / (max{1, 1 - sigma} C)); <= 0
  bool ratio_pass = false;
  bool certified = false;
  nlohmann::json to_json() const;
};

// Minimal L >= 3 with (2C)^{e/2} sum_{k in B, k >= L} k^{-e} <= 1, e = tau + eps, C = C(3);
// the condition is then re-checked with C recomputed for digits >= L.
UpperCertificate upper_certificate(const DigitSet& b, const SignSequence& sigma, long double epsilon,
                                   const UpperOptions& options = {});

struct ReportOptions {
  std::vector<long double> epsilons{0.1L, 0.05L, 0.02L};
  std::vector<long double> deltas;  // empty: delta = epsilon
  long double tolerance = 0.05L;
  LowerOptions lower;
  UpperOptions upper;
};

struct DimensionRow {
  long double epsilon = 0;
  long double delta = 0;
  std::optional<LowerCertificate> lower;
  std::optional<UpperCertificate> upper;
  std::string lower_note;
  std::string upper_note;
};

struct DimensionReport {
  long double target = 0;  // tau / 2
  std::vector<DimensionRow> rows;
  long double best_lower = 0;
  long double best_upper = 1;
  bool within_tolerance = false;
  std::string narrative;
  nlohmann::json to_json() const;
  std::string csv() const;
};

DimensionReport dimension_report(const DigitSet& b, const GrowthFunction& f, const SignSequence& sigma,
                                 const ReportOptions& options = {});

}  // namespace srcf
