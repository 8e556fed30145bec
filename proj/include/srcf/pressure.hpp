#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "srcf/ifs.hpp"
#include "srcf/parallel.hpp"

namespace srcf {

enum class PartitionMode { kExact, kFactorized };
const char* to_string(PartitionMode m);

// z_low <= log Z_n(s) <= z_high, Z_n(s) = sum over depth-n words of ||D phi_w||_X^s.
struct PressureBracket {
  long double s = 0;
  std::uint64_t n = 0;
  long double z_low = 0;
  long double z_high = 0;
  long double p_low = 0;  // z_low / n
  long double p_high = 0;
  PartitionMode mode = PartitionMode::kFactorized;
  nlohmann::json to_json() const;
};

struct EnumerationOptions {
  std::uint64_t cap = 10'000'000;  // max words at the deepest level
  ExecutionOptions exec;
};

// Every word of depth 1..n with its exact sup norm, stored as -log ||D phi_w||_X.
// Words are grouped by first digit so sums reduce in a fixed order.
class WordTable {
 public:
  std::uint64_t depth() const { return depth_; }
  std::uint64_t words(std::uint64_t k) const;
  // log Z_k(s) for k = 1 .. depth.
  std::vector<long double> log_partition(long double s, const ExecutionOptions& exec = {}) const;

  friend WordTable enumerate_words(const NonAutonomousIFS&, std::uint64_t, const EnumerationOptions&);

 private:
  std::uint64_t depth_ = 0;
  std::vector<std::vector<std::vector<long double>>> chunks_;  // [first digit][k-1][word]
};

// Throws EnumerationCapExceeded when the depth-n word count exceeds options.cap.
WordTable enumerate_words(const NonAutonomousIFS& system, std::uint64_t n, const EnumerationOptions& options = {});

PressureBracket partition_bracket(const NonAutonomousIFS& system, long double s, std::uint64_t n,
                                  PartitionMode mode, const EnumerationOptions& options = {});
// Brackets at each listed depth; one enumeration serves all depths in exact mode.
std::vector<PressureBracket> partition_profile(const NonAutonomousIFS& system, long double s,
                                               const std::vector<std::uint64_t>& depths, PartitionMode mode,
                                               const EnumerationOptions& options = {});

// Factorized bracket from the chain rule: prod_j sum_i inf^s <= Z_n(s) <= prod_j sum_i sup^s.
PressureBracket factorized_bracket(const NonAutonomousIFS& system, long double s, std::uint64_t n);

struct PressureRecord {
  long double s = 0;
  std::vector<PressureBracket> brackets;
  std::uint64_t burn_in = 0;
  bool positive = false;  // p_low > 0 at every scheduled n >= burn_in
  bool negative = false;  // p_high < 0 at every scheduled n >= burn_in
  nlohmann::json to_json() const;
};
// burn_in = 0 picks the third-to-last scheduled depth.
PressureRecord lower_pressure(const NonAutonomousIFS& system, long double s, const std::vector<std::uint64_t>& depths,
                              PartitionMode mode, std::uint64_t burn_in = 0, const EnumerationOptions& options = {});

enum class PressureEstimator {
  kAverage,    // (1/n) log Z_n
  kIncrement,  // log Z_n - log Z_{n-1}; needs n - 1 in the schedule
};
const char* to_string(PressureEstimator e);

enum class BowenStatus { kCertified, kIndeterminateAtDepth };
const char* to_string(BowenStatus s);

struct BowenOptions {
  long double tolerance = 1e-3;
  std::vector<std::uint64_t> depths;  // ascending
  PartitionMode mode = PartitionMode::kExact;
  PressureEstimator estimator = PressureEstimator::kAverage;
  std::size_t persistence = 3;
  std::size_t max_iterations = 64;
  EnumerationOptions enumeration;
};

struct PressureSign {
  long double s = 0;
  long double low = 0;  // estimator bracket at the deepest depth
  long double high = 0;
  int sign = 0;  // +1, -1, 0 = straddles zero somewhere in the persistence window
};

struct BowenBracket {
  long double s_minus = 0;
  long double s_plus = 1;
  BowenStatus status = BowenStatus::kCertified;
  PressureSign evidence_minus;
  PressureSign evidence_plus;
  std::size_t iterations = 0;
  PressureEstimator estimator = PressureEstimator::kAverage;
  PartitionMode mode = PartitionMode::kExact;
  std::vector<std::uint64_t> depths;
  std::string detail;
  nlohmann::json to_json() const;
};
BowenBracket bowen_bisect(const NonAutonomousIFS& system, const BowenOptions& options);

}  // namespace srcf
