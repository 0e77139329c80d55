// SPDX-License-Identifier: Apache-2.0
//
// Result serialization (JSON and CSV), the pinned reference-value battery
// behind the reproduce command, the oracle/no-signalling property battery,
// and the manifest-driven command entry points shared by the CLI and tests.

#pragma once

#include "trishare/config.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace trishare {

struct RunManifest {
  std::string command;
  std::string input_path;        // empty when the command needs no config
  std::string output_path = "-";  // "-" writes to stdout
  std::string format = "json";    // "json" or "csv"
  std::uint64_t seed = 0;
  long budget = 0;   // 0 picks the per-command default
  int restarts = 0;  // 0 picks the default
  bool fix_reference_angles = false;
  bool allow_unsharp_final = false;
};

/// Exit codes: 0 success / all-pass, 1 reproduction or property failure,
/// 2 input validation error.
inline constexpr int kExitSuccess = 0;
inline constexpr int kExitCheckFailure = 1;
inline constexpr int kExitValidationError = 2;

enum class CheckMode { Equals, Exceeds, Report };

/// One pinned reference value: computed result, expectation, tolerance and
/// verdict. Report-mode items are informational and always pass.
struct ReproItem {
  std::string name;
  CheckMode mode = CheckMode::Equals;
  double expected = 0.0;
  double computed = 0.0;
  double tolerance = 0.0;
  bool passed = true;
  std::string note;
};

struct ReproOptions {
  long budget = 0;  // 0 = default
  int restarts = 0;
  std::uint64_t seed = 0;
  bool include_searches = true;  // max-observer counts and free-angle optima
};

std::vector<ReproItem> run_reproduction_battery(const ReproOptions& options);

/// One property-suite check: the observed deviation (or witness magnitude)
/// against its bound.
struct PropertyItem {
  std::string name;
  double observed = 0.0;
  double bound = 0.0;
  bool require_below = true;  // false: observed must exceed the bound
  bool passed = true;
  std::string note;
};

std::vector<PropertyItem> run_oracle_battery(std::uint64_t seed);

std::string format_double(double value);

std::string report_to_json(const InequalityReport& report, const ScenarioConfig& config);
std::string report_to_csv(const InequalityReport& report);
std::string search_to_json(const SearchResult& result, const SearchSpec& spec);
std::string search_to_csv(const SearchResult& result);
std::string sweep_to_json(const std::vector<SweepRow>& rows);
std::string sweep_to_csv(const std::vector<SweepRow>& rows);
std::string repro_to_json(const std::vector<ReproItem>& items);
std::string repro_to_csv(const std::vector<ReproItem>& items);
std::string properties_to_json(const std::vector<PropertyItem>& items);
std::string properties_to_csv(const std::vector<PropertyItem>& items);

int run_evaluate(const RunManifest& manifest);
int run_optimize(const RunManifest& manifest);
int run_sweep(const RunManifest& manifest);
int run_reproduce(const RunManifest& manifest);
int run_oracle_check(const RunManifest& manifest);

/// Dispatch on manifest.command; maps validation failures to exit code 2.
int run_command(const RunManifest& manifest, std::ostream& errors);

}  // namespace trishare
