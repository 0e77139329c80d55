// SPDX-License-Identifier: Apache-2.0

#include "trishare/report.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace trishare {

namespace {

using nlohmann::ordered_json;

constexpr long kDefaultSearchBudget = 150000;
constexpr int kDefaultSearchRestarts = 24;

const char* kTableHeader = "scenario_id,m,lambda_m,M_m,S_m,c000,c001,c010,c011,c100,c101,c110,c111";

std::string charlie_csv_row(long scenario_id, int m, double lambda, double mermin,
                            double svetlichny, const CorrelationTable& table) {
  std::ostringstream row;
  row << scenario_id << "," << m << "," << format_double(lambda) << "," << format_double(mermin)
      << "," << format_double(svetlichny);
  for (double c : table.values) row << "," << format_double(c);
  return row.str();
}

ordered_json charlie_json(const CharlieResult& cr) {
  ordered_json correlations;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int l = 0; l < 2; ++l) {
        const std::string key = std::to_string(i) + std::to_string(j) + std::to_string(l);
        correlations[key] = cr.correlations.value(i, j, l);
      }
  return ordered_json{{"m", cr.m},
                      {"lambda", cr.lambda},
                      {"mermin", cr.mermin},
                      {"svetlichny", cr.svetlichny},
                      {"correlations", correlations}};
}

const char* state_name(StateKind kind) {
  switch (kind) {
    case StateKind::GHZ: return "ghz";
    case StateKind::W: return "w";
    default: return "custom";
  }
}

const char* kind_name(Inequality kind) {
  return kind == Inequality::Mermin ? "mermin" : "svetlichny";
}

void check_item(ReproItem& item) {
  switch (item.mode) {
    case CheckMode::Equals:
      item.passed = std::abs(item.computed - item.expected) <= item.tolerance;
      break;
    case CheckMode::Exceeds:
      item.passed = item.computed > item.expected;
      break;
    case CheckMode::Report:
      item.passed = true;
      break;
  }
}

SearchSpec battery_spec(Inequality kind, StateKind state, int n, std::vector<double> thresholds,
                        AngleMode mode, const ReproOptions& options) {
  SearchSpec spec;
  spec.kind = kind;
  spec.state = state;
  spec.num_charlies = n;
  spec.thresholds = std::move(thresholds);
  spec.angle_mode = mode;
  spec.budget = options.budget > 0 ? options.budget : kDefaultSearchBudget;
  spec.restarts = options.restarts > 0 ? options.restarts : kDefaultSearchRestarts;
  spec.seed = options.seed;
  return spec;
}

void write_output(const RunManifest& manifest, const std::string& payload) {
  if (manifest.output_path == "-" || manifest.output_path.empty()) {
    std::cout << payload;
    if (!payload.empty() && payload.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(manifest.output_path, std::ios::binary);
  if (!out) throw ConfigError(0, "cannot open output file: " + manifest.output_path);
  out << payload;
  if (!payload.empty() && payload.back() != '\n') out << '\n';
}

bool is_csv(const RunManifest& manifest) {
  if (manifest.format == "csv") return true;
  if (manifest.format == "json") return false;
  throw ConfigError(0, "format must be json or csv, got '" + manifest.format + "'");
}

}  // namespace

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.12g", value);
  return buffer;
}

std::string report_to_json(const InequalityReport& report, const ScenarioConfig& config) {
  ordered_json charlies = ordered_json::array();
  for (const CharlieResult& cr : report.charlies) charlies.push_back(charlie_json(cr));
  const ordered_json doc{{"command", "evaluate"},
                         {"state", state_name(config.state.kind)},
                         {"num_charlies", config.num_charlies()},
                         {"charlies", charlies}};
  return doc.dump(2);
}

std::string report_to_csv(const InequalityReport& report) {
  std::ostringstream out;
  out << kTableHeader << "\n";
  for (const CharlieResult& cr : report.charlies)
    out << charlie_csv_row(0, cr.m, cr.lambda, cr.mermin, cr.svetlichny, cr.correlations) << "\n";
  return out.str();
}

std::string search_to_json(const SearchResult& result, const SearchSpec& spec) {
  ordered_json values = ordered_json::array();
  for (double v : result.per_charlie_values) values.push_back(v);
  ordered_json lambdas = ordered_json::array();
  for (const CharlieStage& stage : result.best_config.charlies)
    lambdas.push_back(stage.sharpness.lambda());
  const ordered_json doc{
      {"command", "optimize"},
      {"kind", kind_name(spec.kind)},
      {"state", state_name(spec.state)},
      {"num_charlies", spec.num_charlies},
      {"thresholds", spec.thresholds},
      {"angle_mode", spec.angle_mode == AngleMode::FreeAngles ? "free" : "fixed"},
      {"seed", spec.seed},
      {"budget", spec.budget},
      {"restarts", spec.restarts},
      {"best_value", result.best_value},
      {"feasible", result.feasible},
      {"evaluations_used", result.evaluations_used},
      {"per_charlie_values", values},
      {"lambdas", lambdas},
      {"best_scenario", serialize_scenario(result.best_config)}};
  return doc.dump(2);
}

std::string search_to_csv(const SearchResult& result) {
  const InequalityReport report = evaluate(result.best_config);
  return report_to_csv(report);
}

std::string sweep_to_json(const std::vector<SweepRow>& rows) {
  ordered_json arr = ordered_json::array();
  for (const SweepRow& row : rows) {
    ordered_json correlations = ordered_json::array();
    for (double c : row.correlations.values) correlations.push_back(c);
    arr.push_back(ordered_json{{"scenario_id", row.scenario_id},
                               {"m", row.m},
                               {"lambda", row.lambda},
                               {"mermin", row.mermin},
                               {"svetlichny", row.svetlichny},
                               {"correlations", correlations}});
  }
  return ordered_json{{"command", "sweep"}, {"rows", arr}}.dump(2);
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << kTableHeader << "\n";
  for (const SweepRow& row : rows)
    out << charlie_csv_row(row.scenario_id, row.m, row.lambda, row.mermin, row.svetlichny,
                           row.correlations)
        << "\n";
  return out.str();
}

std::string repro_to_json(const std::vector<ReproItem>& items) {
  ordered_json arr = ordered_json::array();
  bool all_passed = true;
  for (const ReproItem& item : items) {
    const char* mode = item.mode == CheckMode::Equals   ? "equals"
                       : item.mode == CheckMode::Exceeds ? "exceeds"
                                                         : "report";
    ordered_json entry{{"item", item.name},
                       {"mode", mode},
                       {"expected", item.expected},
                       {"computed", item.computed},
                       {"deviation", std::abs(item.computed - item.expected)},
                       {"tolerance", item.tolerance},
                       {"status", item.passed ? "pass" : "fail"}};
    if (!item.note.empty()) entry["note"] = item.note;
    arr.push_back(entry);
    all_passed = all_passed && item.passed;
  }
  return ordered_json{{"command", "reproduce"},
                      {"status", all_passed ? "pass" : "fail"},
                      {"items", arr}}
      .dump(2);
}

std::string repro_to_csv(const std::vector<ReproItem>& items) {
  std::ostringstream out;
  out << "item,mode,expected,computed,deviation,tolerance,status,note\n";
  for (const ReproItem& item : items) {
    const char* mode = item.mode == CheckMode::Equals   ? "equals"
                       : item.mode == CheckMode::Exceeds ? "exceeds"
                                                         : "report";
    std::string note = item.note;
    for (char& c : note)
      if (c == ',') c = ';';
    out << item.name << "," << mode << "," << format_double(item.expected) << ","
        << format_double(item.computed) << ","
        << format_double(std::abs(item.computed - item.expected)) << ","
        << format_double(item.tolerance) << "," << (item.passed ? "pass" : "fail") << "," << note
        << "\n";
  }
  return out.str();
}

std::string properties_to_json(const std::vector<PropertyItem>& items) {
  ordered_json arr = ordered_json::array();
  bool all_passed = true;
  for (const PropertyItem& item : items) {
    ordered_json entry{{"check", item.name},
                       {"observed", item.observed},
                       {"bound", item.bound},
                       {"requirement", item.require_below ? "below" : "above"},
                       {"status", item.passed ? "pass" : "fail"}};
    if (!item.note.empty()) entry["note"] = item.note;
    arr.push_back(entry);
    all_passed = all_passed && item.passed;
  }
  return ordered_json{{"command", "oracle-check"},
                      {"status", all_passed ? "pass" : "fail"},
                      {"checks", arr}}
      .dump(2);
}

std::string properties_to_csv(const std::vector<PropertyItem>& items) {
  std::ostringstream out;
  out << "check,observed,bound,requirement,status,note\n";
  for (const PropertyItem& item : items) {
    out << item.name << "," << format_double(item.observed) << "," << format_double(item.bound)
        << "," << (item.require_below ? "below" : "above") << ","
        << (item.passed ? "pass" : "fail") << "," << item.note << "\n";
  }
  return out.str();
}

std::vector<ReproItem> run_reproduction_battery(const ReproOptions& options) {
  std::vector<ReproItem> items;
  auto add = [&](std::string name, CheckMode mode, double expected, double computed,
                 double tolerance, std::string note = "") {
    ReproItem item{std::move(name), mode, expected, computed, tolerance, true, std::move(note)};
    check_item(item);
    items.push_back(std::move(item));
  };

  // Sharp single-observer maxima.
  add("ghz_mermin_sharp_max", CheckMode::Equals, 4.0,
      mermin_value(reference_scenario(Inequality::Mermin, StateKind::GHZ, {}), 1), 1e-9);
  add("ghz_svetlichny_sharp_max", CheckMode::Equals, 4.0 * std::sqrt(2.0),
      svetlichny_value(reference_scenario(Inequality::Svetlichny, StateKind::GHZ, {}), 1), 1e-9);

  // Two sequential Mermin observers.
  const ChainResult mermin2 = analytic_chain(Inequality::Mermin, {2.10});
  const ScenarioConfig mermin2_config =
      reference_scenario(Inequality::Mermin, StateKind::GHZ, {mermin2.lambdas[0]});
  add("mermin_n2_lambda1", CheckMode::Equals, 0.525, mermin2.lambdas[0], 1e-6,
      "source prints lambda1 = 0.52, inconsistent with M1 = 2.10 at the third digit");
  add("mermin_n2_M1", CheckMode::Equals, 2.10, mermin_value(mermin2_config, 1), 1e-6);
  add("mermin_n2_M2", CheckMode::Equals, 3.70, mermin_value(mermin2_config, 2), 0.01);
  const ScenarioConfig mermin2_printed =
      reference_scenario(Inequality::Mermin, StateKind::GHZ, {0.52});
  add("mermin_n2_M1_at_printed_lambda", CheckMode::Report, 2.10,
      mermin_value(mermin2_printed, 1), 0.0, "at the printed lambda1 = 0.52 the chain gives 2.08");
  add("mermin_n2_M2_at_printed_lambda", CheckMode::Report, 3.70,
      mermin_value(mermin2_printed, 2), 0.0, "at the printed lambda1 = 0.52");

  // Three sequential Mermin observers.
  const ChainResult mermin3 = analytic_chain(Inequality::Mermin, {2.10, 2.10});
  const ScenarioConfig mermin3_config = reference_scenario(
      Inequality::Mermin, StateKind::GHZ, {mermin3.lambdas[0], mermin3.lambdas[1]});
  add("mermin_n3_lambda2", CheckMode::Equals, 0.57, mermin3.lambdas[1], 0.01);
  add("mermin_n3_M3", CheckMode::Equals, 3.38, mermin_value(mermin3_config, 3), 0.01);

  // Seven-observer Mermin ceiling at the reference settings.
  add("mermin_chain_M7_at_2.05", CheckMode::Equals, 1.49,
      analytic_chain(Inequality::Mermin, std::vector<double>(6, 2.05)).final_value, 0.01);
  add("mermin_chain_M7_at_2.00", CheckMode::Equals, 1.76,
      analytic_chain(Inequality::Mermin, std::vector<double>(6, 2.00)).final_value, 0.01);
  add("mermin_chain_six_violations", CheckMode::Exceeds, 2.0,
      analytic_chain(Inequality::Mermin, std::vector<double>(5, 2.05)).final_value, 0.0,
      "all six values sit at 2.05 or above when the sixth exceeds 2");

  // Two sequential Svetlichny observers.
  const ChainResult sve2 = analytic_chain(Inequality::Svetlichny, {4.20});
  const ScenarioConfig sve2_config =
      reference_scenario(Inequality::Svetlichny, StateKind::GHZ, {sve2.lambdas[0]});
  add("svetlichny_n2_lambda1", CheckMode::Equals, 0.7425, sve2.lambdas[0], 1e-4,
      "source prints lambda1 = 0.74");
  add("svetlichny_n2_S1", CheckMode::Equals, 4.20, svetlichny_value(sve2_config, 1), 1e-6);
  add("svetlichny_n2_S2", CheckMode::Equals, 4.72, svetlichny_value(sve2_config, 2), 0.01);

  // Double-violation sharpness window.
  const SharpnessWindow window = sharpness_window();
  add("svetlichny_window_low", CheckMode::Equals, 0.7071, window.lambda_low, 0.005,
      "rounds to the printed [0.71, 0.91]");
  add("svetlichny_window_high", CheckMode::Equals, 0.9102, window.lambda_high, 0.005);

  // Three Svetlichny observers at the fixed reference settings.
  const SearchResult sve3_fixed_a =
      optimize(battery_spec(Inequality::Svetlichny, StateKind::GHZ, 3, {4.20, 4.20},
                            AngleMode::ReferenceAnglesFixed, options));
  add("svetlichny_n3_S3_fixed_angles_at_4.20", CheckMode::Equals, 3.44, sve3_fixed_a.best_value,
      0.01);
  const SearchResult sve3_fixed_b =
      optimize(battery_spec(Inequality::Svetlichny, StateKind::GHZ, 3, {4.00, 4.00},
                            AngleMode::ReferenceAnglesFixed, options));
  add("svetlichny_n3_S3_fixed_angles_at_4.00", CheckMode::Equals, 3.77, sve3_fixed_b.best_value,
      0.01, "source text says S1 = S2 = 2; read as the local bound 4");
  add("svetlichny_n3_lambda1_at_4.00", CheckMode::Equals, 0.71,
      sve3_fixed_b.best_config.charlies[0].sharpness.lambda(), 0.01);
  add("svetlichny_n3_lambda2_at_4.00", CheckMode::Equals, 0.83,
      sve3_fixed_b.best_config.charlies[1].sharpness.lambda(), 0.01);

  if (!options.include_searches) return items;

  // Free-angle re-optimization of the same three-observer chains.
  const SearchResult sve3_free_a = optimize(battery_spec(
      Inequality::Svetlichny, StateKind::GHZ, 3, {4.20, 4.20}, AngleMode::FreeAngles, options));
  add("svetlichny_n3_S3_free_angles_at_4.20", CheckMode::Report, 3.44, sve3_free_a.best_value,
      0.0, "joint angle re-optimization beats the fixed-settings value");
  const SearchResult sve3_free_b = optimize(battery_spec(
      Inequality::Svetlichny, StateKind::GHZ, 3, {4.00, 4.00}, AngleMode::FreeAngles, options));
  add("svetlichny_n3_S3_free_angles_at_4.00", CheckMode::Report, 3.77, sve3_free_b.best_value,
      0.0, "approaches the local bound 4 without crossing it");

  // Simultaneous-violation counts.
  const long budget = options.budget > 0 ? options.budget : kDefaultSearchBudget;
  const int restarts = options.restarts > 0 ? options.restarts : kDefaultSearchRestarts;
  add("max_observers_mermin_ghz", CheckMode::Equals, 6.0,
      max_observers(Inequality::Mermin, StateKind::GHZ, kDefaultFeasibilityMargin, budget,
                    restarts, options.seed),
      0.0,
      "six holds for the fixed reference settings; the free-angle search keeps finding "
      "violating chains up to the n = 12 guard");
  add("max_observers_svetlichny_ghz", CheckMode::Equals, 2.0,
      max_observers(Inequality::Svetlichny, StateKind::GHZ, kDefaultFeasibilityMargin, budget,
                    restarts, options.seed),
      0.0);
  add("max_observers_mermin_w", CheckMode::Equals, 3.0,
      max_observers(Inequality::Mermin, StateKind::W, kDefaultFeasibilityMargin, budget, restarts,
                    options.seed),
      0.0, "three holds only for restricted settings; free angles extend the chain");
  add("max_observers_svetlichny_w", CheckMode::Equals, 1.0,
      max_observers(Inequality::Svetlichny, StateKind::W, kDefaultFeasibilityMargin, budget,
                    restarts, options.seed),
      0.0);

  return items;
}

std::vector<PropertyItem> run_oracle_battery(std::uint64_t seed) {
  std::vector<PropertyItem> items;
  auto add = [&](std::string name, double observed, double bound, bool require_below,
                 std::string note = "") {
    const bool passed = require_below ? observed <= bound : observed > bound;
    items.push_back(
        PropertyItem{std::move(name), observed, bound, require_below, passed, std::move(note)});
  };

  double oracle_dev = 0.0;
  double norm_dev = 0.0;
  double no_signal_dev = 0.0;
  for (std::uint64_t draw = 0; draw < 50; ++draw) {
    auto rng = rng_stream(seed, "oracle-draw", draw);
    const int n = 1 + static_cast<int>(draw % 3);
    std::uniform_real_distribution<double> theta(0.0, M_PI);
    std::uniform_real_distribution<double> phi(0.0, 2.0 * M_PI);
    std::uniform_real_distribution<double> lam(0.1, 0.95);
    auto party = [&] { return PartySettings{{theta(rng), phi(rng)}, {theta(rng), phi(rng)}}; };
    ScenarioConfig config{
        InitialState::of_kind(draw % 2 ? StateKind::GHZ : StateKind::W), party(), party(), {},
        true};
    for (int m = 0; m < n; ++m)
      config.charlies.push_back({party(), Sharpness(m + 1 == n ? 1.0 : lam(rng))});

    const auto tables = correlation_tables(config);
    for (int m = 1; m <= n; ++m) {
      const CorrelationTable oracle = oracle_correlation_table(config, m);
      for (int idx = 0; idx < 8; ++idx)
        oracle_dev = std::max(oracle_dev,
                              std::abs(tables[static_cast<size_t>(m - 1)].values[static_cast<size_t>(idx)] -
                                       oracle.values[static_cast<size_t>(idx)]));
    }

    std::vector<int> settings;
    for (int p = 0; p < n + 2; ++p) settings.push_back(static_cast<int>(rng() % 2));
    const JointDistribution dist = oracle_joint_distribution(config, settings);
    norm_dev = std::max(norm_dev, std::abs(dist.total() - 1.0));

    // Alice/Bob marginals must ignore the whole Charlie chain.
    if (n <= 2) {
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          double reference[2][2] = {{-1.0, -1.0}, {-1.0, -1.0}};
          const int chain_choices = 1 << n;
          for (int packed = 0; packed < chain_choices; ++packed) {
            std::vector<int> choice{i, j};
            for (int m = 0; m < n; ++m) choice.push_back((packed >> m) & 1);
            const JointDistribution d = oracle_joint_distribution(config, choice);
            for (int a : {+1, -1})
              for (int b : {+1, -1}) {
                const double p = d.marginal({0, 1}, {a, b});
                double& ref = reference[a == -1][b == -1];
                if (ref < 0.0)
                  ref = p;
                else
                  no_signal_dev = std::max(no_signal_dev, std::abs(p - ref));
              }
          }
        }
    }
  }
  add("oracle_vs_recursion", oracle_dev, 1e-12, true,
      "50 seeded draws, n <= 3, all Charlies and correlation components");
  add("joint_normalization", norm_dev, 1e-12, true);
  add("spatial_no_signalling", no_signal_dev, 1e-12, true,
      "Alice/Bob marginals across every Charlie setting choice");

  // Effects complete to identity.
  double completeness_dev = 0.0;
  double sqrt_dev = 0.0;
  {
    auto rng = rng_stream(seed, "property-draw", 0);
    std::uniform_real_distribution<double> theta(0.0, M_PI);
    std::uniform_real_distribution<double> phi(0.0, 2.0 * M_PI);
    std::uniform_real_distribution<double> lam(1e-3, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
      const BlochDirection d{theta(rng), phi(rng)};
      const Sharpness s(lam(rng));
      const Matrix sum = effect(d, +1, s).matrix + effect(d, -1, s).matrix;
      completeness_dev =
          std::max(completeness_dev, (sum - identity_matrix(2)).cwiseAbs().maxCoeff());
      const Matrix root = sqrt_effect(d, +1, s);
      sqrt_dev = std::max(sqrt_dev,
                          (root * root - effect(d, +1, s).matrix).cwiseAbs().maxCoeff());
    }
  }
  add("effect_completeness", completeness_dev, 1e-12, true);
  add("sqrt_effect_consistency", sqrt_dev, 1e-12, true);

  // Structural validity of states along random update chains.
  double herm_dev = 0.0;
  double trace_dev = 0.0;
  double psd_defect = 0.0;
  {
    auto rng = rng_stream(seed, "property-draw", 1);
    std::uniform_real_distribution<double> theta(0.0, M_PI);
    std::uniform_real_distribution<double> phi(0.0, 2.0 * M_PI);
    std::uniform_real_distribution<double> lam(0.05, 1.0);
    DensityMatrix state = InitialState::ghz().matrix;
    for (int step = 0; step < 12; ++step) {
      const PartySettings settings{{theta(rng), phi(rng)}, {theta(rng), phi(rng)}};
      state = averaged_post_state(state, {settings, Sharpness(lam(rng))});
      herm_dev = std::max(herm_dev, hermiticity_defect(state.matrix()));
      trace_dev = std::max(trace_dev, std::abs(state.matrix().trace().real() - 1.0));
      psd_defect = std::max(psd_defect, std::max(0.0, -smallest_eigenvalue(state.matrix())));
    }
  }
  add("state_hermiticity", herm_dev, 1e-12, true);
  add("state_trace", trace_dev, 1e-12, true);
  add("state_psd_defect", psd_defect, 1e-10, true);

  // Temporal signalling witness: a sharp first Charlie shifts the joint
  // statistics seen one link later.
  {
    ScenarioConfig config = reference_scenario(Inequality::Svetlichny, StateKind::GHZ, {0.9});
    config.charlies.front().sharpness = Sharpness(1.0);
    double max_shift = 0.0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int l = 0; l < 2; ++l) {
          const JointDistribution k0 = oracle_joint_distribution(config, {i, j, 0, l});
          const JointDistribution k1 = oracle_joint_distribution(config, {i, j, 1, l});
          for (int a : {+1, -1})
            for (int b : {+1, -1})
              for (int c2 : {+1, -1})
                max_shift = std::max(max_shift, std::abs(k0.marginal({0, 1, 3}, {a, b, c2}) -
                                                         k1.marginal({0, 1, 3}, {a, b, c2})));
        }
    add("temporal_signalling_witness", max_shift, 0.01, false,
        "sharp first Charlie at the reference Svetlichny settings");
  }

  return items;
}

int run_evaluate(const RunManifest& manifest) {
  if (manifest.input_path.empty()) throw ConfigError(0, "evaluate needs --config");
  const ConfigFile file = load_config(manifest.input_path, manifest.allow_unsharp_final);
  if (!file.scenario) throw ConfigError(0, "config has no scenario sections");
  const InequalityReport report = evaluate(*file.scenario);
  write_output(manifest,
               is_csv(manifest) ? report_to_csv(report) : report_to_json(report, *file.scenario));
  return kExitSuccess;
}

int run_optimize(const RunManifest& manifest) {
  if (manifest.input_path.empty()) throw ConfigError(0, "optimize needs --config");
  const ConfigFile file = load_config(manifest.input_path, manifest.allow_unsharp_final);
  if (!file.search) throw ConfigError(0, "config has no [search] section");
  SearchSpec spec = *file.search;
  if (manifest.budget > 0) spec.budget = manifest.budget;
  if (manifest.restarts > 0) spec.restarts = manifest.restarts;
  spec.seed = manifest.seed;
  if (manifest.fix_reference_angles) spec.angle_mode = AngleMode::ReferenceAnglesFixed;
  const SearchResult result = optimize(spec);
  write_output(manifest,
               is_csv(manifest) ? search_to_csv(result) : search_to_json(result, spec));
  return kExitSuccess;
}

int run_sweep(const RunManifest& manifest) {
  if (manifest.input_path.empty()) throw ConfigError(0, "sweep needs --config");
  const ConfigFile file = load_config(manifest.input_path, manifest.allow_unsharp_final);
  if (!file.scenario) throw ConfigError(0, "config has no scenario sections");
  if (!file.sweep_grids) throw ConfigError(0, "config has no [sweep] section");
  const long budget = manifest.budget > 0 ? manifest.budget : 100000;
  const auto rows = sweep(*file.scenario, *file.sweep_grids, budget);
  write_output(manifest, is_csv(manifest) ? sweep_to_csv(rows) : sweep_to_json(rows));
  return kExitSuccess;
}

int run_reproduce(const RunManifest& manifest) {
  ReproOptions options;
  options.budget = manifest.budget;
  options.restarts = manifest.restarts;
  options.seed = manifest.seed;
  const auto items = run_reproduction_battery(options);
  write_output(manifest, is_csv(manifest) ? repro_to_csv(items) : repro_to_json(items));
  for (const ReproItem& item : items)
    if (!item.passed) return kExitCheckFailure;
  return kExitSuccess;
}

int run_oracle_check(const RunManifest& manifest) {
  const auto items = run_oracle_battery(manifest.seed);
  write_output(manifest,
               is_csv(manifest) ? properties_to_csv(items) : properties_to_json(items));
  for (const PropertyItem& item : items)
    if (!item.passed) return kExitCheckFailure;
  return kExitSuccess;
}

int run_command(const RunManifest& manifest, std::ostream& errors) {
  try {
    if (manifest.command == "evaluate") return run_evaluate(manifest);
    if (manifest.command == "optimize") return run_optimize(manifest);
    if (manifest.command == "sweep") return run_sweep(manifest);
    if (manifest.command == "reproduce") return run_reproduce(manifest);
    if (manifest.command == "oracle-check") return run_oracle_check(manifest);
    errors << "unknown command: " << manifest.command << "\n";
    return kExitValidationError;
  } catch (const ConfigError& err) {
    errors << (manifest.input_path.empty() ? "config" : manifest.input_path) << ": " << err.what()
           << "\n";
    return kExitValidationError;
  } catch (const std::exception& err) {
    errors << manifest.command << ": " << err.what() << "\n";
    return kExitValidationError;
  }
}

}  // namespace trishare
