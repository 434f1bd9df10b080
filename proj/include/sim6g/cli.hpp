#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "sim6g/scenarios.hpp"

namespace sim6g::cli {

inline constexpr std::int64_t kConfigVersion = 1;

/// Exit-code contract.
enum ExitCode : int {
  kExitOk = 0,        // success, or expected denial matching the config
  kExitRejected = 1,  // unexpected outcome, authorization/verification failure
  kExitInput = 2,     // config or input error
};

struct OutputSpec {
  std::string path;
  std::string format = "structured";
};

struct RunConfig {
  scenario::ScenarioConfig scenario;
  OutputSpec output;
};

/// Parses the versioned JSON run configuration. Throws ConfigError with a
/// message naming the offending field, actor or node.
RunConfig parse_run_config(std::string_view text);

/// Inverse of parse_run_config, canonical text.
std::string format_run_config(const RunConfig& config);

/// Entry point shared by the binary and the tests. `args` excludes argv[0].
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sim6g::cli
