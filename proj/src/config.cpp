#include "config.hpp"

#include <fstream>
#include <sstream>

#include "CLI11.hpp"

namespace permwalk::cli {

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string normalize_key(std::string k) {
  for (auto& c : k)
    if (c == '_') c = '-';
  return k;
}

}  // namespace

ExperimentConfig parse_config(std::string_view text, std::string source) {
  ExperimentConfig cfg;
  cfg.source = std::move(source);
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto eq = t.find('=');
    auto where = cfg.source + ":" + std::to_string(lineno);
    if (eq == std::string::npos) throw UsageError(where + ": expected key=value");
    auto key = normalize_key(trim(std::string_view(t).substr(0, eq)));
    auto value = trim(std::string_view(t).substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    if (key.empty() || key.find_first_not_of("abcdefghijklmnopqrstuvwxyz0123456789-") != std::string::npos)
      throw UsageError(where + ": bad key '" + key + "'");
    if (!cfg.values.emplace(key, value).second) throw UsageError(where + ": duplicate key '" + key + "'");
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

void apply_config(CLI::App& sub, const ExperimentConfig& cfg) {
  for (const auto& [key, value] : cfg.values) {
    if (key == "config" || key == "help") throw UsageError(cfg.source + ": key '" + key + "' is not allowed");
    auto* opt = sub.get_option_no_throw("--" + key);
    if (opt == nullptr)
      throw UsageError(cfg.source + ": unknown key '" + key + "' for " + sub.get_name());
    if (opt->count() > 0) continue;  // the flag wins
    opt->add_result(value);
    try {
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw UsageError(cfg.source + ": " + key + ": " + e.what());
    }
  }
}

}  // namespace permwalk::cli
