#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

namespace CLI {
class App;
}

namespace permwalk::cli {

// Bad flags, bad config keys, malformed inputs: all end as exit 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Flat key=value experiment file.  Keys are option names without the leading dashes;
// '_' and '-' are interchangeable.
struct ExperimentConfig {
  std::map<std::string, std::string> values;
  std::string source = "<config>";

  bool has(const std::string& key) const { return values.count(key) != 0; }
};

ExperimentConfig parse_config(std::string_view text, std::string source = "<config>");
ExperimentConfig load_config(const std::string& path);

// Fills options of `sub` that were not given on the command line. Keys that `sub` does not
// know are rejected.
void apply_config(CLI::App& sub, const ExperimentConfig& cfg);

}  // namespace permwalk::cli
