#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace srcf {

enum class ErrorCode {
  kInvalidArgument,
  kInadmissible,
  kNotConformal,
  kEnumerationCapExceeded,
  kEpsilonOutOfRange,
  kHorizonTooSmall,
  kBeyondHorizon,
  kNonAutonomousInput,
  kNoTailBound,
  kLSearchExhausted,
  kSchemeBuildFailure,
  kOverflow,
  kParse,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what,
        std::optional<std::uint64_t> index = std::nullopt)
      : std::runtime_error(what), code_(code), index_(index) {}

  ErrorCode code() const { return code_; }
  // Level, position or depth the error refers to, when there is one.
  std::optional<std::uint64_t> index() const { return index_; }

 private:
  ErrorCode code_;
  std::optional<std::uint64_t> index_;
};

}  // namespace srcf
