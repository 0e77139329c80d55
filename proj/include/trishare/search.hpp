// SPDX-License-Identifier: Apache-2.0
//
// Constrained derivative-free maximization over measurement angles and
// sharpness schedules: multistart Nelder-Mead over a penalty-augmented
// objective, refined by coordinate-wise golden-section polish. Deterministic
// for a fixed seed.

#pragma once

#include "trishare/protocol.hpp"

#include <random>
#include <string_view>

namespace trishare {

inline constexpr long kDefaultBudget = 200000;
inline constexpr int kDefaultRestarts = 64;
inline constexpr double kDefaultFeasibilityMargin = 1e-3;

enum class AngleMode { FreeAngles, ReferenceAnglesFixed };

struct SearchSpec {
  Inequality kind = Inequality::Mermin;
  StateKind state = StateKind::GHZ;
  int num_charlies = 2;
  /// Minimum required value for Charlies 1..n-1, size n-1.
  std::vector<double> thresholds;
  AngleMode angle_mode = AngleMode::FreeAngles;
  /// Max objective evaluations across all restarts and polish.
  long budget = kDefaultBudget;
  int restarts = kDefaultRestarts;
  std::uint64_t seed = 0;
  /// Required excess of the final value over the classical bound for the
  /// result to count as feasible.
  double feasibility_margin = kDefaultFeasibilityMargin;

  void validate() const;
};

struct SearchResult {
  double best_value;
  ScenarioConfig best_config;
  bool feasible;
  long evaluations_used;
  std::vector<double> per_charlie_values;
};

/// Named splittable RNG stream: every random draw in the artifact flows
/// from (seed, label, index), so parallel or reordered work stays
/// reproducible. Labels in use: "search-start", "oracle-draw",
/// "property-draw".
std::mt19937_64 rng_stream(std::uint64_t seed, std::string_view label, std::uint64_t index);

/// Maximizes the final Charlie's inequality value subject to the earlier
/// Charlies' thresholds. Warm starts, when given, are injected as
/// additional start points (extended with a copy of their last Charlie when
/// they are one Charlie short).
SearchResult optimize(const SearchSpec& spec);
SearchResult optimize(const SearchSpec& spec, const std::vector<ScenarioConfig>& warm_starts);

/// Largest n for which optimize finds all n Charlies above
/// classical bound + margin; ascends n from 1 and stops at the first
/// infeasible n.
int max_observers(Inequality kind, StateKind state, double margin = kDefaultFeasibilityMargin,
                  long budget_per_n = kDefaultBudget, int restarts = kDefaultRestarts,
                  std::uint64_t seed = 0);

struct SharpnessWindow {
  double lambda_low = 0.0;
  double lambda_high = 0.0;
};

/// Double-violation window for the two-Charlie Svetlichny chain on GHZ at
/// the reference settings: bisection for S1 = 4 (lower edge) and S2 = 4
/// (upper edge), each to 1e-4.
SharpnessWindow sharpness_window();

struct SweepRow {
  long scenario_id = 0;
  int m = 1;
  double lambda = 1.0;
  double mermin = 0.0;
  double svetlichny = 0.0;
  CorrelationTable correlations;
};

/// Cartesian-product sweep over per-Charlie sharpness grids; an empty grid
/// keeps that Charlie's prototype sharpness. Emits n rows per grid point,
/// order-stable. Throws std::runtime_error ("sweep budget exceeded") before
/// starting when the grid has more points than the budget allows.
std::vector<SweepRow> sweep(const ScenarioConfig& prototype,
                            const std::vector<std::vector<double>>& lambda_grids, long budget);

}  // namespace trishare
