#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "symevol/experiments.hpp"

namespace symevol {

/// Malformed or inconsistent configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat "section.key" → value view of an INI-style configuration file.
///
///   [model]    a1 a2 a3 a4 omega epsilon n decay decay_power delta
///   [initial]  t q1 v1 q2 v2
///   [run]      horizon method step rtol atol sample_dt max_steps label observables
///   [compare]  resonance eps_list L near_identity
///   [ensemble] count seed threads q1 v1 q2 v2   (e.g. "v1 = normal 0.5 0.05",
///              "q1 = uniform -0.1 0.1", "q2 = fixed 0")
///
/// Unknown sections or keys are rejected.
using ConfigMap = std::map<std::string, std::string>;

ConfigMap parse_config(std::string_view text);
ConfigMap load_config(const std::filesystem::path& path);

/// Sorted "section.key=value" lines.
std::string canonical_config(const ConfigMap& config);
/// Hex SHA-256 of canonical_config.
std::string config_digest(const ConfigMap& config);
std::string sha256_hex(std::string_view data);

double get_double(const ConfigMap& config, const std::string& key, double fallback);
std::optional<double> find_double(const ConfigMap& config, const std::string& key);
std::vector<double> parse_double_list(std::string_view text);

ScenarioConfig scenario_from_config(const ConfigMap& config);
EnsembleSpec ensemble_from_config(const ConfigMap& config);

struct CompareSettings {
  std::optional<AveragedSystem> resonance;
  std::vector<double> eps_list;
  CompareOptions options;
};

CompareSettings compare_from_config(const ConfigMap& config);

}  // namespace symevol
