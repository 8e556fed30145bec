#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace srcf {

inline constexpr const char* kToolName = "srcf";
inline constexpr const char* kToolVersion = "0.1.0";

// Command-line overrides; when set they replace the instance's value and show up in the
// resolved instance that every output embeds.
struct CliFlags {
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> depth;
  std::optional<unsigned> precision_bits;
  std::optional<long double> tolerance;
  unsigned threads = 1;
  bool deterministic = true;
  bool csv = false;
};

// Exit codes: 0 certified, 2 indeterminate, 1 input error.
struct CliResult {
  int exit_code = 0;
  std::string out;
  std::string err;
};

const std::vector<std::string>& command_names();
CliResult run_command(const std::string& command, std::string_view instance_text, const CliFlags& flags);

}  // namespace srcf
