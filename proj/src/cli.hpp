#pragma once

#include <iosfwd>
#include <string>

namespace permwalk::cli {

enum ExitCode : int {
  exit_ok = 0,
  exit_check_failed = 1,  // verify found a counterexample
  exit_usage = 2,         // bad flags, bad config, malformed input
  exit_budget = 3,        // resource budget refusal
  exit_internal = 4,
};

// Default directory for relative output paths.
inline constexpr const char* out_dir_env = "PERMWALK_OUT_DIR";

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Relative paths land in $PERMWALK_OUT_DIR when it is set.
std::string resolve_output(const std::string& path);

// Write to a sibling temp file, then rename over the target.
void write_atomic(const std::string& path, const std::string& content);

}  // namespace permwalk::cli
