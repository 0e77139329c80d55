// SPDX-License-Identifier: Apache-2.0

#include "trishare/protocol.hpp"

#include <cmath>
#include <functional>
#include <sstream>

namespace trishare {

namespace {

using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;
using Mat8 = Eigen::Matrix<Complex, 8, 8>;

// Inequality coefficients over the table index 4i + 2j + l.
constexpr std::array<double, 8> kMerminCoeffs = {0, 1, 1, 0, 1, 0, 0, -1};
constexpr std::array<double, 8> kSvetlichnyCoeffs = {1, 1, -1, 1, 1, -1, 1, 1};

const std::array<double, 8>& coeffs(Inequality kind) {
  return kind == Inequality::Mermin ? kMerminCoeffs : kSvetlichnyCoeffs;
}

// rho' = 1/2 sum_{k,c} (I4 (x) root) rho (I4 (x) root), evaluated blockwise
// on the Charlie slot.
Mat8 averaged_channel(const Mat8& rho, const CharlieStage& stage) {
  Mat8 out = Mat8::Zero();
  for (int k = 0; k < 2; ++k) {
    for (int outcome : {+1, -1}) {
      const Mat2 root = sqrt_effect(stage.settings.setting(k), outcome, stage.sharpness);
      for (int u = 0; u < 4; ++u)
        for (int v = 0; v < 4; ++v)
          out.block<2, 2>(2 * u, 2 * v) += 0.5 * (root * rho.block<2, 2>(2 * u, 2 * v) * root);
    }
  }
  return out;
}

// R(u, v) = Tr[o . rho_block(u, v)], the Charlie-slot contraction leaving a
// 4x4 operator kernel on Alice (x) Bob.
Mat4 charlie_contraction(const Mat8& rho, const Mat2& o) {
  Mat4 r;
  for (int u = 0; u < 4; ++u)
    for (int v = 0; v < 4; ++v) {
      const auto b = rho.block<2, 2>(2 * u, 2 * v);
      r(u, v) = o(0, 0) * b(0, 0) + o(0, 1) * b(1, 0) + o(1, 0) * b(0, 1) + o(1, 1) * b(1, 1);
    }
  return r;
}

double real_trace_product4(const Mat4& a, const Mat4& b) {
  Complex s{0.0, 0.0};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) s += a(i, j) * b(j, i);
  return s.real();
}

void check_charlie_index(const ScenarioConfig& config, int m) {
  if (m < 1 || m > config.num_charlies()) {
    std::ostringstream msg;
    msg << "Charlie index " << m << " out of range [1, " << config.num_charlies() << "]";
    throw std::invalid_argument(msg.str());
  }
}

void check_tuple_sizes(const ScenarioConfig& config, const std::vector<int>& settings,
                       const std::vector<int>& outcomes, bool with_outcomes) {
  const size_t parties = static_cast<size_t>(config.num_charlies()) + 2;
  if (settings.size() != parties)
    throw std::invalid_argument("settings choice must list one index per party");
  for (int s : settings)
    if (s != 0 && s != 1) throw std::invalid_argument("setting indices must be 0 or 1");
  if (!with_outcomes) return;
  if (outcomes.size() != parties)
    throw std::invalid_argument("outcome tuple must list one outcome per party");
  for (int o : outcomes)
    if (o != 1 && o != -1) throw std::invalid_argument("outcomes must be +1 or -1");
}

}  // namespace

double classical_bound(Inequality kind) { return kind == Inequality::Mermin ? 2.0 : 4.0; }

double quantum_bound(Inequality kind) {
  return kind == Inequality::Mermin ? 4.0 : 4.0 * std::sqrt(2.0);
}

InitialState InitialState::ghz() {
  Vector v = Vector::Zero(8);
  v(0) = v(7) = 1.0 / std::sqrt(2.0);
  return InitialState{StateKind::GHZ, DensityMatrix::pure(v)};
}

InitialState InitialState::w() {
  Vector v = Vector::Zero(8);
  v(1) = v(2) = v(4) = 1.0 / std::sqrt(3.0);
  return InitialState{StateKind::W, DensityMatrix::pure(v)};
}

InitialState InitialState::custom(DensityMatrix m) {
  if (m.dim() != 8)
    throw std::invalid_argument("custom initial state must be a three-qubit (8x8) density matrix");
  return InitialState{StateKind::Custom, std::move(m)};
}

InitialState InitialState::of_kind(StateKind kind) {
  switch (kind) {
    case StateKind::GHZ: return ghz();
    case StateKind::W: return w();
    default: throw std::invalid_argument("custom initial state requires an explicit matrix");
  }
}

void ScenarioConfig::validate() const {
  if (charlies.empty()) throw std::invalid_argument("scenario needs at least one Charlie");
  if (num_charlies() > kMaxCharlies) {
    std::ostringstream msg;
    msg << "scenario exceeds the Charlie chain guard (" << num_charlies() << " > " << kMaxCharlies
        << ")";
    throw std::invalid_argument(msg.str());
  }
  if (state.matrix.dim() != 8)
    throw std::invalid_argument("scenario state must be a three-qubit (8x8) density matrix");
  if (require_sharp_final && !charlies.back().sharpness.is_sharp())
    throw std::invalid_argument(
        "final Charlie sharpness must be 1 (disable via allow-unsharp-final for sweeps)");
}

double mermin_from_table(const CorrelationTable& table) {
  return inequality_from_table(Inequality::Mermin, table);
}

double svetlichny_from_table(const CorrelationTable& table) {
  return inequality_from_table(Inequality::Svetlichny, table);
}

double inequality_from_table(Inequality kind, const CorrelationTable& table) {
  const auto& c = coeffs(kind);
  double sum = 0.0;
  for (int idx = 0; idx < 8; ++idx) sum += c[static_cast<size_t>(idx)] * table.values[static_cast<size_t>(idx)];
  return std::abs(sum);
}

DensityMatrix averaged_post_state(const DensityMatrix& rho, const CharlieStage& charlie) {
  if (rho.dim() != 8)
    throw std::invalid_argument("averaged_post_state expects a three-qubit state");
  Mat8 out = averaged_channel(rho.matrix(), charlie);
  Matrix herm = 0.5 * (Matrix(out) + Matrix(out).adjoint());
  return DensityMatrix(std::move(herm));
}

std::vector<CorrelationTable> correlation_tables(const ScenarioConfig& config) {
  config.validate();
  const int n = config.num_charlies();

  Mat4 ab[2][2];
  for (int i = 0; i < 2; ++i) {
    const Matrix a = observable(config.alice.setting(i));
    for (int j = 0; j < 2; ++j)
      ab[i][j] = kron(a, observable(config.bob.setting(j)));
  }

  std::vector<CorrelationTable> tables;
  tables.reserve(static_cast<size_t>(n));
  Mat8 rho = config.state.matrix.matrix();
  for (int m = 0; m < n; ++m) {
    const CharlieStage& stage = config.charlies[static_cast<size_t>(m)];
    const double lambda = stage.sharpness.lambda();
    Mat4 contraction[2];
    for (int l = 0; l < 2; ++l)
      contraction[l] = charlie_contraction(rho, observable(stage.settings.setting(l)));

    CorrelationTable table;
    table.charlie_index = m + 1;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int l = 0; l < 2; ++l)
          table.values[static_cast<size_t>(4 * i + 2 * j + l)] =
              lambda * real_trace_product4(ab[i][j], contraction[l]);
    tables.push_back(table);

    if (m + 1 < n) rho = averaged_channel(rho, stage);
  }
  return tables;
}

CorrelationTable correlation_table(const ScenarioConfig& config, int m) {
  check_charlie_index(config, m);
  return correlation_tables(config)[static_cast<size_t>(m - 1)];
}

double avg_correlation(const ScenarioConfig& config, int m, int i, int j, int l) {
  check_charlie_index(config, m);
  return correlation_table(config, m).value(i, j, l);
}

double mermin_value(const ScenarioConfig& config, int m) {
  return mermin_from_table(correlation_table(config, m));
}

double svetlichny_value(const ScenarioConfig& config, int m) {
  return svetlichny_from_table(correlation_table(config, m));
}

std::vector<double> inequality_values(const ScenarioConfig& config, Inequality kind) {
  const auto tables = correlation_tables(config);
  std::vector<double> values;
  values.reserve(tables.size());
  for (const auto& table : tables) values.push_back(inequality_from_table(kind, table));
  return values;
}

InequalityReport evaluate(const ScenarioConfig& config) {
  const auto tables = correlation_tables(config);
  InequalityReport report;
  report.charlies.reserve(tables.size());
  for (size_t m = 0; m < tables.size(); ++m) {
    CharlieResult result;
    result.m = static_cast<int>(m) + 1;
    result.lambda = config.charlies[m].sharpness.lambda();
    result.mermin = mermin_from_table(tables[m]);
    result.svetlichny = svetlichny_from_table(tables[m]);
    result.correlations = tables[m];
    report.charlies.push_back(result);
  }
  return report;
}

double joint_probability(const ScenarioConfig& config, const std::vector<int>& settings,
                         const std::vector<int>& outcomes) {
  config.validate();
  check_tuple_sizes(config, settings, outcomes, true);
  const int n = config.num_charlies();

  const Matrix pa = projector(config.alice.setting(settings[0]), outcomes[0]);
  const Matrix pb = projector(config.bob.setting(settings[1]), outcomes[1]);
  const Matrix sandwich = kron(kron(pa, pb), identity_matrix(2));
  const Matrix pinched = sandwich * config.state.matrix.matrix() * sandwich;

  // Everything after Alice and Bob lives on the Charlie qubit alone.
  Matrix charlie_state = partial_trace_matrix(pinched, {Party::Charlie});
  for (int t = 0; t + 1 < n; ++t) {
    const CharlieStage& stage = config.charlies[static_cast<size_t>(t)];
    const Matrix root =
        sqrt_effect(stage.settings.setting(settings[static_cast<size_t>(2 + t)]),
                    outcomes[static_cast<size_t>(2 + t)], stage.sharpness);
    charlie_state = root * charlie_state * root;
  }
  const CharlieStage& last = config.charlies[static_cast<size_t>(n - 1)];
  const Effect final_effect =
      effect(last.settings.setting(settings[static_cast<size_t>(n + 1)]),
             outcomes[static_cast<size_t>(n + 1)], last.sharpness);
  return trace_product(final_effect.matrix, charlie_state).real();
}

JointDistribution::JointDistribution(int num_parties, std::vector<int> settings)
    : num_parties_(num_parties),
      settings_(std::move(settings)),
      probs_(std::size_t{1} << num_parties, 0.0) {}

double JointDistribution::probability(const std::vector<int>& outcomes) const {
  if (outcomes.size() != static_cast<size_t>(num_parties_))
    throw std::invalid_argument("outcome tuple size mismatch");
  std::uint32_t packed = 0;
  for (int o : outcomes) packed = (packed << 1) | (o == -1 ? 1u : 0u);
  return probs_[packed];
}

double JointDistribution::total() const {
  double sum = 0.0;
  for (double p : probs_) sum += p;
  return sum;
}

double JointDistribution::outcome_product_mean(const std::vector<int>& parties) const {
  double acc = 0.0;
  for (std::uint32_t packed = 0; packed < probs_.size(); ++packed) {
    int sign = 1;
    for (int p : parties)
      if ((packed >> (num_parties_ - 1 - p)) & 1u) sign = -sign;
    acc += sign * probs_[packed];
  }
  return acc;
}

double JointDistribution::marginal(const std::vector<int>& parties,
                                   const std::vector<int>& outcomes) const {
  double acc = 0.0;
  for (std::uint32_t packed = 0; packed < probs_.size(); ++packed) {
    bool match = true;
    for (size_t t = 0; t < parties.size(); ++t) {
      const int bit = (packed >> (num_parties_ - 1 - parties[t])) & 1u;
      if ((outcomes[t] == -1) != (bit == 1)) {
        match = false;
        break;
      }
    }
    if (match) acc += probs_[packed];
  }
  return acc;
}

JointDistribution oracle_joint_distribution(const ScenarioConfig& config,
                                            const std::vector<int>& settings) {
  config.validate();
  check_tuple_sizes(config, settings, {}, false);
  const int n = config.num_charlies();
  if (n > kOracleMaxCharlies) throw std::invalid_argument("oracle enumeration bound exceeded");
  const int parties = n + 2;

  JointDistribution dist(parties, settings);

  std::function<void(const DensityMatrix&, int, double, std::uint32_t)> descend =
      [&](const DensityMatrix& rho, int party_idx, double prob, std::uint32_t packed) {
        if (party_idx == parties) {
          dist.at(packed) = prob;
          return;
        }
        Party slot;
        BlochDirection direction;
        Sharpness sharpness = sharp();
        if (party_idx == 0) {
          slot = Party::Alice;
          direction = config.alice.setting(settings[0]);
        } else if (party_idx == 1) {
          slot = Party::Bob;
          direction = config.bob.setting(settings[1]);
        } else {
          slot = Party::Charlie;
          const CharlieStage& stage = config.charlies[static_cast<size_t>(party_idx - 2)];
          direction = stage.settings.setting(settings[static_cast<size_t>(party_idx)]);
          sharpness = stage.sharpness;
        }
        for (int outcome : {+1, -1}) {
          const std::uint32_t child = (packed << 1) | (outcome == -1 ? 1u : 0u);
          const double p = outcome_probability(rho, slot, direction, outcome, sharpness);
          if (p < kZeroProbability) {
            // Post-state undefined; spread the (at most kZeroProbability)
            // residual mass uniformly over the subtree's leaves.
            const int rest = parties - party_idx - 1;
            const std::uint32_t leaves = std::uint32_t{1} << rest;
            for (std::uint32_t leaf = 0; leaf < leaves; ++leaf)
              dist.at((child << rest) | leaf) = prob * p / leaves;
            continue;
          }
          const LudersResult next = luders_update(rho, slot, direction, outcome, sharpness);
          descend(next.state, party_idx + 1, prob * next.probability, child);
        }
      };

  descend(config.state.matrix, 0, 1.0, 0);
  return dist;
}

double oracle_avg_correlation(const ScenarioConfig& config, int m, int i, int j, int l) {
  check_charlie_index(config, m);
  const int n = config.num_charlies();
  const int prior = m - 1;
  double acc = 0.0;
  for (std::uint32_t kvec = 0; kvec < (std::uint32_t{1} << prior); ++kvec) {
    std::vector<int> settings(static_cast<size_t>(n) + 2, 0);
    settings[0] = i;
    settings[1] = j;
    for (int t = 0; t < prior; ++t)
      settings[static_cast<size_t>(2 + t)] = static_cast<int>((kvec >> (prior - 1 - t)) & 1u);
    settings[static_cast<size_t>(2 + prior)] = l;
    const JointDistribution dist = oracle_joint_distribution(config, settings);
    acc += dist.outcome_product_mean({0, 1, 2 + prior});
  }
  return acc / static_cast<double>(std::uint32_t{1} << prior);
}

CorrelationTable oracle_correlation_table(const ScenarioConfig& config, int m) {
  check_charlie_index(config, m);
  CorrelationTable table;
  table.charlie_index = m;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int l = 0; l < 2; ++l)
        table.values[static_cast<size_t>(4 * i + 2 * j + l)] =
            oracle_avg_correlation(config, m, i, j, l);
  return table;
}

ChainResult analytic_chain(Inequality kind, const std::vector<double>& thresholds) {
  const double ceiling = quantum_bound(kind);
  double damping = 1.0;
  ChainResult out;
  for (double target : thresholds) {
    if (!(target > 0.0))
      throw std::invalid_argument("analytic_chain: thresholds must be positive");
    const double lam = target / (ceiling * damping);
    if (lam > 1.0 + 1e-12) throw std::runtime_error("threshold chain infeasible");
    const double clamped = std::min(lam, 1.0);
    out.lambdas.push_back(clamped);
    damping *= 0.5 * (1.0 + std::sqrt(std::max(0.0, 1.0 - clamped * clamped)));
  }
  out.lambdas.push_back(1.0);
  out.final_value = ceiling * damping;
  return out;
}

PartySettings reference_settings(Inequality kind, Party party) {
  const PartySettings yx{bloch_y(), bloch_x()};
  if (kind == Inequality::Mermin) return yx;
  switch (party) {
    case Party::Alice: return PartySettings{bloch_x(), bloch_y()};
    case Party::Bob: return yx;
    default:
      return PartySettings{BlochDirection{M_PI / 2.0, M_PI / 4.0},
                           BlochDirection{M_PI / 2.0, 3.0 * M_PI / 4.0}};
  }
}

ScenarioConfig reference_scenario(Inequality kind, StateKind state,
                                  const std::vector<double>& unsharp_lambdas) {
  ScenarioConfig config{InitialState::of_kind(state), reference_settings(kind, Party::Alice),
                        reference_settings(kind, Party::Bob), {}, true};
  const PartySettings charlie = reference_settings(kind, Party::Charlie);
  for (double lam : unsharp_lambdas) config.charlies.push_back({charlie, Sharpness(lam)});
  config.charlies.push_back({charlie, sharp()});
  return config;
}

}  // namespace trishare
