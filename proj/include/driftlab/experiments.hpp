#pragma once

#include <cstdint>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

namespace driftlab {

using Config = std::map<std::string, std::string>;

struct ConfigKey {
  std::string name;
  /// Empty optional marks a required key.
  std::optional<std::string> fallback;
  std::string help;
};

const std::vector<std::string>& experiment_names();
/// Keys accepted by an experiment; throws ValidationError for unknown names.
const std::vector<ConfigKey>& experiment_keys(const std::string& name);

/// Rejects unknown keys, lists every missing required key in one message and
/// fills in defaults.
Config resolve_config(const std::string& name, const Config& config);

struct ExperimentOutput {
  /// Full document: schema, subcommand, resolved config, seed, report.
  nlohmann::json document;
  /// Human-readable lines for the terminal.
  std::string summary;
};

/// Runs an experiment and writes report.json plus its CSV files into
/// out_dir. The seed only drives random test functions and random drifts.
ExperimentOutput run_experiment(const std::string& name, const Config& config,
                                const std::string& out_dir, std::uint64_t seed);

}  // namespace driftlab
