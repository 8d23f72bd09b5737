#pragma once

// Scenario runner behind the command-line tool.
//
// Configuration is flat `key=value` text; `#` starts a comment line. The
// reserved keys are scenario, seed, out, figure and library_version; keys
// starting with `result.` are outputs and are ignored on input, so a run
// manifest can be fed back as a config. Every other key must be a parameter
// of the selected scenario.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "hybridqc/error.hpp"

namespace hqc::scenario {

struct ScenarioConfig {
  std::string scenario;
  std::map<std::string, std::string> params;
  std::string out;
  std::uint64_t seed = 0;
  bool figure = false;

  /// Routes reserved keys; any other key becomes a parameter (checked later,
  /// against the scenario).
  void set(const std::string& key, const std::string& value);

  /// Applies key=value lines on top of the current settings.
  void merge(const std::string& text, const std::string& origin = "<config>");
  void merge_file(const std::filesystem::path& path);

  static ScenarioConfig parse(const std::string& text, const std::string& origin = "<config>");
  static ScenarioConfig load_file(const std::filesystem::path& path);
};

/// Scenario names in dispatch order.
const std::vector<std::string>& scenario_names();

/// Parameter names accepted by a scenario; the required ones are flagged.
std::vector<std::pair<std::string, bool>> scenario_parameters(const std::string& scenario);

struct RunOutcome {
  std::vector<std::pair<std::string, std::string>> results;
  std::vector<std::filesystem::path> files;
};

/// Validates the whole configuration before touching the file system, then
/// writes series.csv, manifest.txt and (with figure=true) figure.svg into
/// `out`. Throws Error: config for bad configuration, io for unwritable output,
/// numerical for non-finite results, verification when the verify scenario
/// finds a failing criterion (its outputs are still written).
RunOutcome run(const ScenarioConfig& cfg);

/// 0 success, 2 config/io, 3 numerical, 4 verification, 1 anything else.
int exit_code(ErrorCode code);

}  // namespace hqc::scenario
