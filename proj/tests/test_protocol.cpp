// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_support.hpp"
#include "trishare/protocol.hpp"

#include <cmath>

using namespace trishare;

namespace {

ScenarioConfig single_charlie(const PartySettings& all, double lambda = 1.0) {
  return ScenarioConfig{InitialState::ghz(), all, all, {{all, Sharpness(lambda)}}, true};
}

constexpr double kSvetlichnyMax = 5.656854249492380;  // 4 sqrt(2)

}  // namespace

TEST_CASE("initial states are pure with the expected marginals") {
  for (const InitialState& state : {InitialState::ghz(), InitialState::w()}) {
    const Matrix rho = state.matrix.matrix();
    CHECK(std::abs((rho * rho).trace().real() - 1.0) < 1e-12);
    CHECK_NOTHROW(state.matrix.validate());
  }
  const DensityMatrix ghz_c = partial_trace(InitialState::ghz().matrix, {Party::Charlie});
  CHECK((ghz_c.matrix() - 0.5 * identity_matrix(2)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("scenario validation") {
  const PartySettings z{bloch_z(), bloch_x()};
  ScenarioConfig config = single_charlie(z);
  CHECK_NOTHROW(config.validate());

  config.charlies.clear();
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);

  config = single_charlie(z);
  for (int i = 0; i < kMaxCharlies; ++i) config.charlies.push_back({z, Sharpness(0.5)});
  CHECK_THROWS_WITH_AS(config.validate(), doctest::Contains("guard"), std::invalid_argument);

  config = single_charlie(z, 0.5);
  CHECK_THROWS_WITH_AS(config.validate(), doctest::Contains("final Charlie"),
                       std::invalid_argument);
  config.require_sharp_final = false;
  CHECK_NOTHROW(config.validate());

  CHECK_THROWS_AS(InitialState::custom(DensityMatrix::basis_state(4, 0)), std::invalid_argument);
}

TEST_CASE("averaged post state: sharp z dephasing of GHZ") {
  const CharlieStage stage{{bloch_z(), bloch_z()}, Sharpness(1.0)};
  const DensityMatrix out = averaged_post_state(InitialState::ghz().matrix, stage);
  Matrix expected = Matrix::Zero(8, 8);
  expected(0, 0) = expected(7, 7) = 0.5;
  CHECK((out.matrix() - expected).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("averaged post state: vanishing-sharpness limit leaves the state alone") {
  const CharlieStage stage{reference_settings(Inequality::Mermin, Party::Charlie),
                           Sharpness(1e-9)};
  const DensityMatrix in = InitialState::ghz().matrix;
  const DensityMatrix out = averaged_post_state(in, stage);
  CHECK((out.matrix() - in.matrix()).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("averaged post state at lambda 0.525 supports a 3.70 sharp optimum") {
  const CharlieStage stage{reference_settings(Inequality::Mermin, Party::Charlie),
                           Sharpness(0.525)};
  const DensityMatrix disturbed = averaged_post_state(InitialState::ghz().matrix, stage);

  const PartySettings yx = reference_settings(Inequality::Mermin, Party::Alice);
  const ScenarioConfig after{InitialState::custom(disturbed), yx, yx, {{yx, Sharpness(1.0)}},
                             true};
  CHECK(std::abs(mermin_value(after, 1) - 3.70) < 0.01);
}

TEST_CASE("joint probabilities of the sharp-z GHZ chain") {
  const PartySettings zz{bloch_z(), bloch_z()};
  const ScenarioConfig config = single_charlie(zz);
  CHECK(std::abs(joint_probability(config, {0, 0, 0}, {+1, +1, +1}) - 0.5) < 1e-14);
  CHECK(std::abs(joint_probability(config, {0, 0, 0}, {+1, +1, -1})) < 1e-14);
}

TEST_CASE("joint probabilities normalize") {
  auto rng = rng_stream(21, "property-draw", 0);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 3);
    const ScenarioConfig config = testing::random_config(rng, StateKind::GHZ, n);
    std::vector<int> settings;
    for (int p = 0; p < n + 2; ++p) settings.push_back(static_cast<int>(rng() % 2));

    double total = 0.0;
    const int parties = n + 2;
    for (int packed = 0; packed < (1 << parties); ++packed) {
      std::vector<int> outcomes;
      for (int p = 0; p < parties; ++p)
        outcomes.push_back(((packed >> (parties - 1 - p)) & 1) ? -1 : +1);
      total += joint_probability(config, settings, outcomes);
    }
    CHECK(std::abs(total - 1.0) < 1e-12);
  }
}

TEST_CASE("GHZ is a +1 eigenstate of the triple-x correlation") {
  // Brute force over all 8 outcomes straight from joint_probability.
  const PartySettings xx{bloch_x(), bloch_x()};
  const ScenarioConfig config = single_charlie(xx);
  double weighted = 0.0;
  for (int packed = 0; packed < 8; ++packed) {
    std::vector<int> outcomes;
    for (int p = 0; p < 3; ++p) outcomes.push_back(((packed >> (2 - p)) & 1) ? -1 : +1);
    weighted += outcomes[0] * outcomes[1] * outcomes[2] *
                joint_probability(config, {0, 0, 0}, outcomes);
  }
  CHECK(std::abs(weighted - 1.0) < 1e-13);
}

TEST_CASE("avg_correlation on yyx is the -1 GHZ eigenvalue") {
  const PartySettings yx{bloch_y(), bloch_x()};
  const ScenarioConfig config = single_charlie(yx);
  // (y, y, x) = setting indices (0, 0, 1)
  CHECK(std::abs(avg_correlation(config, 1, 0, 0, 1) + 1.0) < 1e-13);
}

TEST_CASE("second Charlie reduces to the first in the weak limit") {
  auto rng = rng_stream(22, "property-draw", 0);
  const ScenarioConfig base = testing::random_config(rng, StateKind::GHZ, 1);
  ScenarioConfig two = base;
  two.charlies.insert(two.charlies.begin(), {testing::random_settings(rng), Sharpness(1e-9)});
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int l = 0; l < 2; ++l)
        CHECK(std::abs(avg_correlation(two, 2, i, j, l) - avg_correlation(base, 1, i, j, l)) <
              1e-6);
}

TEST_CASE("equatorial damping factor against the enumeration oracle") {
  // With both Charlies at equal sharpness, the second table is the first
  // scaled by (1 + sqrt(1 - lambda^2))/2; checked against the oracle path.
  const double lambda = 0.63;
  ScenarioConfig config = reference_scenario(Inequality::Mermin, StateKind::GHZ, {lambda});
  config.charlies.back().sharpness = Sharpness(lambda);
  config.require_sharp_final = false;

  const double damping = 0.5 * (1.0 + std::sqrt(1.0 - lambda * lambda));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int l = 0; l < 2; ++l) {
        const double first = oracle_avg_correlation(config, 1, i, j, l);
        const double second = oracle_avg_correlation(config, 2, i, j, l);
        CHECK(std::abs(second - damping * first) < 1e-12);
        CHECK(std::abs(avg_correlation(config, 2, i, j, l) - second) < 1e-12);
      }
}

TEST_CASE("Mermin chain reproduces the reference GHZ values") {
  CHECK(std::abs(mermin_value(reference_scenario(Inequality::Mermin, StateKind::GHZ, {}), 1) -
                 4.0) < 1e-9);

  const ScenarioConfig two = reference_scenario(Inequality::Mermin, StateKind::GHZ, {0.525});
  CHECK(std::abs(mermin_value(two, 1) - 2.10) < 1e-9);
  CHECK(std::abs(mermin_value(two, 2) - 3.70) < 0.01);

  const ScenarioConfig three =
      reference_scenario(Inequality::Mermin, StateKind::GHZ, {0.525, 0.567});
  CHECK(std::abs(mermin_value(three, 1) - 2.10) < 0.01);
  CHECK(std::abs(mermin_value(three, 2) - 2.10) < 0.01);
  CHECK(std::abs(mermin_value(three, 3) - 3.38) < 0.01);
}

TEST_CASE("Svetlichny chain reproduces the reference GHZ values") {
  CHECK(std::abs(
            svetlichny_value(reference_scenario(Inequality::Svetlichny, StateKind::GHZ, {}), 1) -
            kSvetlichnyMax) < 1e-9);

  const ScenarioConfig two =
      reference_scenario(Inequality::Svetlichny, StateKind::GHZ, {0.7425});
  CHECK(std::abs(svetlichny_value(two, 1) - 4.20) < 0.01);
  CHECK(std::abs(svetlichny_value(two, 2) - 4.72) < 0.01);

  const ScenarioConfig three = reference_scenario(Inequality::Svetlichny, StateKind::GHZ,
                                                  {1.0 / std::sqrt(2.0), 0.8284});
  CHECK(std::abs(svetlichny_value(three, 1) - 4.00) < 0.01);
  CHECK(std::abs(svetlichny_value(three, 2) - 4.00) < 0.01);
  CHECK(std::abs(svetlichny_value(three, 3) - 3.77) < 0.01);
}

TEST_CASE("single sharp step: oracle equals the direct Born distribution") {
  auto rng = rng_stream(23, "property-draw", 0);
  const ScenarioConfig config = testing::random_config(rng, StateKind::GHZ, 1);
  const std::vector<int> settings{1, 0, 1};
  const JointDistribution dist = oracle_joint_distribution(config, settings);
  for (int packed = 0; packed < 8; ++packed) {
    std::vector<int> outcomes;
    for (int p = 0; p < 3; ++p) outcomes.push_back(((packed >> (2 - p)) & 1) ? -1 : +1);
    CHECK(std::abs(dist.probability(outcomes) - joint_probability(config, settings, outcomes)) <
          1e-13);
  }
}

TEST_CASE("oracle equivalence over 50 randomized draws") {
  for (std::uint64_t draw = 0; draw < 50; ++draw) {
    auto rng = rng_stream(1234, "oracle-draw", draw);
    const int n = 1 + static_cast<int>(draw % 3);
    const ScenarioConfig config = testing::random_config(rng, draw % 2 ? StateKind::GHZ : StateKind::W, n);
    const auto tables = correlation_tables(config);
    for (int m = 1; m <= n; ++m) {
      const CorrelationTable oracle = oracle_correlation_table(config, m);
      for (int idx = 0; idx < 8; ++idx)
        CHECK(std::abs(tables[static_cast<size_t>(m - 1)].values[static_cast<size_t>(idx)] -
                       oracle.values[static_cast<size_t>(idx)]) < 1e-12);
    }
    // Full-tuple normalization for one settings choice per draw.
    std::vector<int> settings;
    for (int p = 0; p < n + 2; ++p) settings.push_back(static_cast<int>(rng() % 2));
    CHECK(std::abs(oracle_joint_distribution(config, settings).total() - 1.0) < 1e-12);
  }
}

TEST_CASE("spatial no-signalling: Alice/Bob marginals ignore the Charlie chain") {
  auto rng = rng_stream(24, "property-draw", 7);
  const int n = 2;
  const ScenarioConfig config = testing::random_config(rng, StateKind::GHZ, n);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      double reference_marginal[2][2];
      bool have_reference = false;
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) {
          const JointDistribution dist = oracle_joint_distribution(config, {i, j, k, l});
          for (int a : {+1, -1})
            for (int b : {+1, -1}) {
              const double p = dist.marginal({0, 1}, {a, b});
              if (!have_reference)
                reference_marginal[a == -1][b == -1] = p;
              else
                CHECK(std::abs(p - reference_marginal[a == -1][b == -1]) < 1e-12);
            }
          have_reference = true;
        }
    }
}

TEST_CASE("temporal signalling: an earlier Charlie's setting shifts later statistics") {
  // Sharp first Charlie at the reference Svetlichny settings.
  const ScenarioConfig config = [&] {
    ScenarioConfig c = reference_scenario(Inequality::Svetlichny, StateKind::GHZ, {0.9});
    c.charlies.front().sharpness = Sharpness(1.0);
    return c;
  }();
  double max_shift = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int l = 0; l < 2; ++l) {
        const JointDistribution k0 = oracle_joint_distribution(config, {i, j, 0, l});
        const JointDistribution k1 = oracle_joint_distribution(config, {i, j, 1, l});
        for (int a : {+1, -1})
          for (int b : {+1, -1})
            for (int c2 : {+1, -1}) {
              const double shift = std::abs(k0.marginal({0, 1, 3}, {a, b, c2}) -
                                            k1.marginal({0, 1, 3}, {a, b, c2}));
              max_shift = std::max(max_shift, shift);
            }
      }
  CHECK(max_shift > 0.01);
}

TEST_CASE("oracle refuses oversized chains") {
  std::vector<double> lams(6, 0.5);
  const ScenarioConfig config = reference_scenario(Inequality::Mermin, StateKind::GHZ, lams);
  REQUIRE(config.num_charlies() == 7);
  CHECK_THROWS_WITH_AS(oracle_joint_distribution(config, std::vector<int>(9, 0)),
                       doctest::Contains("oracle enumeration bound exceeded"),
                       std::invalid_argument);
}

TEST_CASE("analytic chain endpoints") {
  const ChainResult seven_a = analytic_chain(Inequality::Mermin, std::vector<double>(6, 2.05));
  CHECK(std::abs(seven_a.final_value - 1.49) < 0.01);
  const ChainResult seven_b = analytic_chain(Inequality::Mermin, std::vector<double>(6, 2.00));
  CHECK(std::abs(seven_b.final_value - 1.76) < 0.01);
  const ChainResult sve = analytic_chain(Inequality::Svetlichny, {4.20, 4.20});
  CHECK(std::abs(sve.final_value - 3.44) < 0.01);
  CHECK(std::abs(sve.lambdas[0] - 0.7425) < 0.001);

  CHECK_THROWS_WITH_AS(analytic_chain(Inequality::Mermin, {3.9, 3.9}),
                       doctest::Contains("infeasible"), std::runtime_error);
}

TEST_CASE("analytic chain matches the simulation for random schedules") {
  auto rng = rng_stream(25, "property-draw", 0);
  std::uniform_real_distribution<double> lam(0.05, 0.999);
  for (int kind_idx = 0; kind_idx < 2; ++kind_idx) {
    const Inequality kind = kind_idx == 0 ? Inequality::Mermin : Inequality::Svetlichny;
    const double bound = quantum_bound(kind);
    for (int trial = 0; trial < 20; ++trial) {
      const int n = 2 + static_cast<int>(rng() % 6);  // up to 7
      std::vector<double> lams;
      for (int m = 0; m + 1 < n; ++m) lams.push_back(lam(rng));
      const ScenarioConfig config = reference_scenario(kind, StateKind::GHZ, lams);
      const std::vector<double> sim = inequality_values(config, kind);

      double damping = 1.0;
      for (int m = 0; m < n; ++m) {
        const double lambda_m = m + 1 < n ? lams[static_cast<size_t>(m)] : 1.0;
        const double closed_form = bound * lambda_m * damping;
        CHECK(std::abs(sim[static_cast<size_t>(m)] - closed_form) < 1e-9);
        damping *= 0.5 * (1.0 + std::sqrt(1.0 - lambda_m * lambda_m));
      }
    }
  }
}

TEST_CASE("monotone degradation at the reference settings") {
  auto rng = rng_stream(26, "property-draw", 0);
  std::uniform_real_distribution<double> lam(0.2, 0.95);
  for (const Inequality kind : {Inequality::Mermin, Inequality::Svetlichny}) {
    std::vector<double> lams;
    for (int m = 0; m < 5; ++m) lams.push_back(lam(rng));
    for (int m = 1; m <= 5; ++m) {
      const std::vector<double> head(lams.begin(), lams.begin() + m - 1);
      const std::vector<double> next(lams.begin(), lams.begin() + m);
      const double value_m =
          inequality_values(reference_scenario(kind, StateKind::GHZ, head), kind).back();
      const double value_next =
          inequality_values(reference_scenario(kind, StateKind::GHZ, next), kind).back();
      const double factor = 0.5 * (1.0 + std::sqrt(1.0 - lams[static_cast<size_t>(m - 1)] *
                                                             lams[static_cast<size_t>(m - 1)]));
      CHECK(factor <= 1.0);
      CHECK(std::abs(value_next - factor * value_m) < 1e-9);
    }
  }
}

TEST_CASE("reports stay inside the quantum bounds") {
  auto rng = rng_stream(27, "property-draw", 0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 4);
    const StateKind state = trial % 2 ? StateKind::GHZ : StateKind::W;
    const InequalityReport report = evaluate(testing::random_config(rng, state, n));
    for (const CharlieResult& cr : report.charlies) {
      CHECK(cr.mermin >= 0.0);
      CHECK(cr.mermin <= 4.0 + 1e-9);
      CHECK(cr.svetlichny >= 0.0);
      CHECK(cr.svetlichny <= kSvetlichnyMax + 1e-9);
      for (double c : cr.correlations.values) {
        CHECK(c <= 1.0 + 1e-12);
        CHECK(c >= -1.0 - 1e-12);
      }
    }
  }
}

TEST_CASE("intermediate averaged states stay valid") {
  auto rng = rng_stream(28, "property-draw", 0);
  DensityMatrix state = InitialState::ghz().matrix;
  std::uniform_real_distribution<double> lam(0.05, 1.0);
  for (int step = 0; step < 8; ++step) {
    state = averaged_post_state(state, {testing::random_settings(rng), Sharpness(lam(rng))});
    CHECK_NOTHROW(state.validate());
  }
}

TEST_CASE("charlie index range errors") {
  const ScenarioConfig config = reference_scenario(Inequality::Mermin, StateKind::GHZ, {0.5});
  CHECK_THROWS_AS(avg_correlation(config, 0, 0, 0, 0), std::invalid_argument);
  CHECK_THROWS_AS(avg_correlation(config, 3, 0, 0, 0), std::invalid_argument);
  CHECK_THROWS_AS(mermin_value(config, -1), std::invalid_argument);
}
