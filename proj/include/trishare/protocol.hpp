// SPDX-License-Identifier: Apache-2.0
//
// The sequential-sharing engine: one qubit of a shared three-qubit state is
// measured by a chain of Charlies, each unsharp except the last, while Alice
// and Bob measure sharply on their own qubits. Per-Charlie Mermin and
// Svetlichny values are computed from setting-averaged correlations, either
// through the efficient averaged-state recursion or through the exhaustive
// path-enumeration oracle (the definitional reference the recursion must
// match).

#pragma once

#include "trishare/measure.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace trishare {

inline constexpr int kMaxCharlies = 12;
inline constexpr int kOracleMaxCharlies = 6;

enum class StateKind { GHZ, W, Custom };
enum class Inequality { Mermin, Svetlichny };

/// Local-hidden-variable bound: 2 (Mermin) or 4 (Svetlichny).
double classical_bound(Inequality kind);
/// Quantum maximum: 4 (Mermin) or 4*sqrt(2) (Svetlichny).
double quantum_bound(Inequality kind);

/// Shared three-qubit initial state. GHZ is (|000>+|111>)/sqrt(2), W is
/// (|001>+|010>+|100>)/sqrt(3); both are pure.
struct InitialState {
  StateKind kind;
  DensityMatrix matrix;

  static InitialState ghz();
  static InitialState w();
  static InitialState custom(DensityMatrix m);
  static InitialState of_kind(StateKind kind);
};

/// A party's pair of dichotomic measurement directions.
struct PartySettings {
  BlochDirection setting0;
  BlochDirection setting1;

  const BlochDirection& setting(int index) const { return index == 0 ? setting0 : setting1; }
};

/// One link of the Charlie chain: a setting pair plus the sharpness used
/// for both settings.
struct CharlieStage {
  PartySettings settings;
  Sharpness sharpness;
};

/// Full experiment description. validate() enforces 1 <= n <= kMaxCharlies
/// and, unless require_sharp_final is cleared, a sharp final Charlie.
struct ScenarioConfig {
  InitialState state;
  PartySettings alice;
  PartySettings bob;
  std::vector<CharlieStage> charlies;
  bool require_sharp_final = true;

  int num_charlies() const { return static_cast<int>(charlies.size()); }
  void validate() const;
};

/// Setting-averaged correlations of Alice, Bob and one Charlie. values are
/// indexed by 4i + 2j + l for Alice/Bob/Charlie setting indices (i, j, l).
struct CorrelationTable {
  int charlie_index = 1;
  std::array<double, 8> values{};

  double value(int i, int j, int l) const { return values[static_cast<size_t>(4 * i + 2 * j + l)]; }
};

double mermin_from_table(const CorrelationTable& table);
double svetlichny_from_table(const CorrelationTable& table);
double inequality_from_table(Inequality kind, const CorrelationTable& table);

/// Non-selective averaged update after one Charlie: both outcomes summed and
/// both settings weighted 1/2, i.e.
///   rho' = 1/2 sum_k sum_c (I4 (x) sqrtE_{c,k}) rho (I4 (x) sqrtE_{c,k}).
DensityMatrix averaged_post_state(const DensityMatrix& rho, const CharlieStage& charlie);

/// Probability of one full outcome tuple (Alice, Bob, every Charlie in
/// order) for one choice of settings. `settings` holds one index in {0,1}
/// per party, `outcomes` one value in {+1,-1} per party, both ordered
/// [Alice, Bob, Charlie 1..n].
double joint_probability(const ScenarioConfig& config, const std::vector<int>& settings,
                         const std::vector<int>& outcomes);

/// Averaged correlation of Alice, Bob and Charlie m (1-based) at setting
/// indices (i, j, l), with earlier Charlies' settings averaged uniformly and
/// their outcomes marginalized. Computed by feeding averaged_post_state
/// forward m-1 times.
double avg_correlation(const ScenarioConfig& config, int m, int i, int j, int l);

CorrelationTable correlation_table(const ScenarioConfig& config, int m);

/// All per-Charlie tables in one forward pass.
std::vector<CorrelationTable> correlation_tables(const ScenarioConfig& config);

/// M_m = |C100 + C010 + C001 - C111| for Charlie m.
double mermin_value(const ScenarioConfig& config, int m);

/// S_m = |C000 + C100 - C010 + C110 + C001 - C101 + C011 + C111| for
/// Charlie m.
double svetlichny_value(const ScenarioConfig& config, int m);

/// Per-Charlie values of one inequality, one forward pass.
std::vector<double> inequality_values(const ScenarioConfig& config, Inequality kind);

struct CharlieResult {
  int m = 1;
  double lambda = 1.0;
  double mermin = 0.0;
  double svetlichny = 0.0;
  CorrelationTable correlations;
};

struct InequalityReport {
  std::vector<CharlieResult> charlies;
};

InequalityReport evaluate(const ScenarioConfig& config);

/// Exact joint outcome distribution for one fixed settings choice, obtained
/// by explicit chained Luders updates over every outcome path (no state
/// averaging). Outcome tuples are packed with Alice as the most significant
/// bit and bit value 1 meaning outcome -1.
class JointDistribution {
 public:
  JointDistribution(int num_parties, std::vector<int> settings);

  int num_parties() const { return num_parties_; }
  const std::vector<int>& settings() const { return settings_; }

  double probability(const std::vector<int>& outcomes) const;
  double& at(std::uint32_t packed) { return probs_[packed]; }
  double at(std::uint32_t packed) const { return probs_[packed]; }
  std::size_t size() const { return probs_.size(); }
  double total() const;

  /// Expectation of the product of the listed parties' outcomes.
  double outcome_product_mean(const std::vector<int>& parties) const;
  /// Marginal probability that the listed parties have the listed outcomes.
  double marginal(const std::vector<int>& parties, const std::vector<int>& outcomes) const;

 private:
  int num_parties_;
  std::vector<int> settings_;
  std::vector<double> probs_;
};

/// Throws std::invalid_argument ("oracle enumeration bound exceeded") when
/// the config has more than kOracleMaxCharlies Charlies.
JointDistribution oracle_joint_distribution(const ScenarioConfig& config,
                                            const std::vector<int>& settings);

/// Averaged correlation computed from path enumerations only; must agree
/// with avg_correlation to structural tolerance.
double oracle_avg_correlation(const ScenarioConfig& config, int m, int i, int j, int l);

CorrelationTable oracle_correlation_table(const ScenarioConfig& config, int m);

/// Closed-form chain for the equatorial GHZ settings: V_m = B lambda_m
/// prod_{k<m} (1 + sqrt(1 - lambda_k^2))/2 with B the quantum bound. Solves
/// the lambda schedule so V_m hits thresholds[m-1] for m < n and returns the
/// final value at lambda_n = 1. Validated against the full simulation in the
/// test suite; not a ground truth away from those settings.
struct ChainResult {
  std::vector<double> lambdas;  // size n, final entry 1
  double final_value = 0.0;
};

ChainResult analytic_chain(Inequality kind, const std::vector<double>& thresholds);

/// Built-in reference settings reproducing the known GHZ optima: Mermin uses
/// the y/x pair for every party; Svetlichny uses x/y for Alice, y/x for Bob
/// and the equatorial pair at phi = pi/4, 3pi/4 for every Charlie.
PartySettings reference_settings(Inequality kind, Party party);

/// Scenario at the reference settings with the given unsharp lambdas for
/// Charlies 1..n-1 and a sharp final Charlie (n = lambdas.size() + 1).
ScenarioConfig reference_scenario(Inequality kind, StateKind state,
                                  const std::vector<double>& unsharp_lambdas);

}  // namespace trishare
