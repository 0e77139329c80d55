// SPDX-License-Identifier: Apache-2.0
//
// Flat text scenario format with [state], [alice], [bob] and repeated
// [[charlie]] sections; angles are radians as decimal literals with an
// optional "pi*" prefix (e.g. "pi*0.5"). Optional [search] and [sweep]
// sections drive the optimize and sweep commands.

#pragma once

#include "trishare/search.hpp"

#include <optional>
#include <string>

namespace trishare {

/// Parse failure with the 1-based line it was detected on (0 when the
/// failure is file-level).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

struct ConfigFile {
  std::optional<ScenarioConfig> scenario;
  /// From [search]; budget/restarts/seed are left at defaults for the
  /// caller to override.
  std::optional<SearchSpec> search;
  /// From [sweep]; one grid per Charlie, empty grid = keep prototype value.
  std::optional<std::vector<std::vector<double>>> sweep_grids;
};

ConfigFile parse_config(const std::string& text, bool allow_unsharp_final = false);
ConfigFile load_config(const std::string& path, bool allow_unsharp_final = false);

/// Scenario sections only; requires [state], [alice], [bob] and at least
/// one [[charlie]].
ScenarioConfig parse_scenario(const std::string& text, bool allow_unsharp_final = false);

/// Inverse of parse_scenario up to value identity.
std::string serialize_scenario(const ScenarioConfig& config);

}  // namespace trishare
