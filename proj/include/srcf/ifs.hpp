#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "srcf/block_scheme.hpp"
#include "srcf/mobius.hpp"
#include "srcf/sign_sequence.hpp"

namespace srcf {

// What to do when sigma_n = -1 meets digit 1 in a level alphabet.
enum class AdmissibilityPolicy {
  kReject,              // raise InadmissibleDigitAtLevel
  kRepairFirstWindow,   // scheme-built only: use min(B n [2, inf)) on such levels of window 1
};

struct ContainmentException {
  std::uint64_t level;
  Digit digit;
  Digit bound;  // f(level)
};

struct SubexpEntry {
  std::size_t block;
  long double value;  // log #B_m / (T_{m-1} + 1), the largest (1/n) log #I^(n) on window m
  long double bound;  // 1/m
  bool pass;
};

struct Validation {
  bool open_set = true;  // (A1), exact endpoint check
  std::string open_set_detail;
  // (A2): levels with digits < 3 have no extension-domain distortion claim.
  std::uint64_t small_digit_levels = 0;
  std::optional<std::uint64_t> last_small_digit_level;
  // (A4) witness: ||D phi_{omega|n..k}||_X <= gamma^{k-n+1} whenever k - n >= L.
  Rational gamma{1, 2};
  std::uint64_t contraction_from = 1;  // every level from here on has sup <= 1/4
  std::uint64_t l = 1;
  std::vector<SubexpEntry> subexp;
  std::vector<ContainmentException> containment_exceptions;
  std::uint64_t containment_exception_count = 0;
  std::uint64_t repaired_levels = 0;

  nlohmann::json to_json() const;
};

// Levels first..last share the alphabet for each sign.
struct LevelSegment {
  std::uint64_t first;
  std::uint64_t last;
  std::size_t alphabet_plus;
  std::size_t alphabet_minus;
  std::size_t block;  // 0 for explicit systems
};

class NonAutonomousIFS {
 public:
  const SignSequence& sigma() const { return sigma_; }
  std::uint64_t levels() const { return segments_.empty() ? 0 : segments_.back().last; }
  const std::vector<LevelSegment>& segments() const { return segments_; }
  const std::vector<std::vector<Digit>>& alphabets() const { return alphabets_; }
  // I^(n)
  const std::vector<Digit>& alphabet(std::uint64_t n) const;
  Sign sign(std::uint64_t n) const { return sigma_[n]; }
  const Validation& validation() const { return validation_; }
  const BlockScheme* scheme() const { return scheme_.get(); }
  std::shared_ptr<const BlockScheme> scheme_ptr() const { return scheme_; }
  AdmissibilityPolicy policy() const { return policy_; }
  // One sign and one alphabet at every level.
  bool autonomous() const;
  // log of the number of depth-n words.
  long double log_word_count(std::uint64_t n) const;

  nlohmann::json to_json() const;

  friend NonAutonomousIFS assemble(const SignSequence&, std::shared_ptr<const BlockScheme>, AdmissibilityPolicy);
  friend NonAutonomousIFS assemble(const SignSequence&, const std::vector<std::vector<Digit>>&);

 private:
  const LevelSegment& segment(std::uint64_t n) const;
  void validate();

  SignSequence sigma_ = SignSequence::constant(Sign::kPlus);
  std::vector<std::vector<Digit>> alphabets_;
  std::vector<LevelSegment> segments_;
  std::shared_ptr<const BlockScheme> scheme_;
  AdmissibilityPolicy policy_ = AdmissibilityPolicy::kReject;
  Validation validation_;
};

// I^(n) = B_1 on window 1 and B_m on window m, up to the scheme's last window end.
NonAutonomousIFS assemble(const SignSequence& sigma, std::shared_ptr<const BlockScheme> scheme,
                          AdmissibilityPolicy policy = AdmissibilityPolicy::kReject);
// levels[n-1] is I^(n).
NonAutonomousIFS assemble(const SignSequence& sigma, const std::vector<std::vector<Digit>>& levels);
NonAutonomousIFS autonomous_system(Sign sign, std::vector<Digit> alphabet, std::uint64_t levels);

// sup/inf over X of |D phi_{sign,i}|.
Rational level_sup(Sign sign, Digit i);
Rational level_inf(Sign sign, Digit i);
// sup/inf ratio of |D phi_{sign,i}| on X: ((i+1)/i)^2 for +1, (i/(i-1))^2 for -1.
Rational distortion_ratio(Sign sign, Digit i);

struct ControlConstants {
  long double delta = 0;
  // max sup/inf ratio over every generator used within the horizon
  Rational c_global;
  // least N with b_{N+1} >= C^{1/delta}; empty when no computed block reaches it
  std::optional<std::size_t> n_global;
  long double log_threshold_digit = 0;  // log C^{1/delta}
  // least N with b_{N+1}^delta >= worst ratio at b_{N+1} (then i^delta >= ratio for all i >= b_{N+1})
  std::size_t n = 1;
  // max ratio over the levels 1 .. T_N
  Rational c_window;
  nlohmann::json to_json() const;
};
ControlConstants control_constants(const NonAutonomousIFS& system, long double delta);

struct SampledAddress {
  std::vector<Sign> signs;
  std::vector<Digit> digits;
  RationalInterval interval;
};
// Uniform digit per level from a seeded mt19937_64 stream.
SampledAddress sample_address(const NonAutonomousIFS& system, std::uint64_t seed, std::uint64_t depth);

}  // namespace srcf
