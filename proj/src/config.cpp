// SPDX-License-Identifier: Apache-2.0

#include "trishare/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace trishare {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

struct KeyValue {
  std::string value;
  int line = 0;
  bool used = false;
};

struct Section {
  std::string name;
  int line = 0;
  std::map<std::string, KeyValue> entries;
};

std::vector<Section> split_sections(const std::string& text) {
  std::vector<Section> sections;
  std::istringstream stream(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(stream, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw = raw.substr(0, hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(line_no, "unterminated section header");
      std::string name = line.substr(1, line.size() - 2);
      if (!name.empty() && name.front() == '[') {
        if (name.back() != ']') throw ConfigError(line_no, "unterminated section header");
        name = name.substr(1, name.size() - 2);
        if (name != "charlie")
          throw ConfigError(line_no, "only [[charlie]] may repeat, got [[" + name + "]]");
      }
      sections.push_back(Section{trim(name), line_no, {}});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(line_no, "expected key = value");
    if (sections.empty()) throw ConfigError(line_no, "key before any section header");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(line_no, "empty key");
    if (sections.back().entries.count(key))
      throw ConfigError(line_no, "duplicate key '" + key + "'");
    sections.back().entries[key] = KeyValue{value, line_no, false};
  }
  return sections;
}

double parse_number(const std::string& text, int line, const std::string& field) {
  std::string body = trim(text);
  double scale = 1.0;
  if (body.rfind("pi*", 0) == 0) {
    scale = M_PI;
    body = body.substr(3);
  } else if (body.rfind("-pi*", 0) == 0) {
    scale = -M_PI;
    body = body.substr(4);
  }
  try {
    size_t consumed = 0;
    const double value = std::stod(body, &consumed);
    if (consumed != body.size()) throw std::invalid_argument("trailing characters");
    return scale * value;
  } catch (const std::exception&) {
    throw ConfigError(line, field + ": not a number: '" + trim(text) + "'");
  }
}

KeyValue& require_key(Section& section, const std::string& key, const std::string& context) {
  auto it = section.entries.find(key);
  if (it == section.entries.end())
    throw ConfigError(section.line, context + ": missing key '" + key + "'");
  it->second.used = true;
  return it->second;
}

void reject_unused(const Section& section, const std::string& context) {
  for (const auto& [key, kv] : section.entries)
    if (!kv.used) throw ConfigError(kv.line, context + ": unknown key '" + key + "'");
}

BlochDirection direction_for(Section& section, const std::string& context, int index) {
  const std::string suffix = std::to_string(index);
  KeyValue& theta = require_key(section, "theta" + suffix, context);
  KeyValue& phi = require_key(section, "phi" + suffix, context);
  BlochDirection d{parse_number(theta.value, theta.line, context + ".theta" + suffix),
                   parse_number(phi.value, phi.line, context + ".phi" + suffix)};
  if (d.theta < 0.0 || d.theta > M_PI)
    throw ConfigError(theta.line, context + ".theta" + suffix + ": must lie in [0, pi]");
  if (d.phi < 0.0 || d.phi > 2.0 * M_PI)
    throw ConfigError(phi.line, context + ".phi" + suffix + ": must lie in [0, 2*pi]");
  return d;
}

PartySettings settings_for(Section& section, const std::string& context) {
  return PartySettings{direction_for(section, context, 0), direction_for(section, context, 1)};
}

InitialState state_for(Section& section) {
  KeyValue& kind = require_key(section, "kind", "state");
  if (kind.value == "ghz") return InitialState::ghz();
  if (kind.value == "w") return InitialState::w();
  if (kind.value == "custom") {
    KeyValue& entries = require_key(section, "entries", "state");
    std::istringstream stream(entries.value);
    Matrix m(8, 8);
    for (Eigen::Index r = 0; r < 8; ++r)
      for (Eigen::Index c = 0; c < 8; ++c) {
        double re = 0.0, im = 0.0;
        if (!(stream >> re >> im))
          throw ConfigError(entries.line,
                            "state.entries: expected 64 're im' pairs in row-major order");
        m(r, c) = Complex{re, im};
      }
    double spare;
    if (stream >> spare)
      throw ConfigError(entries.line, "state.entries: more than 64 pairs given");
    try {
      return InitialState::custom(DensityMatrix(std::move(m)));
    } catch (const std::invalid_argument& err) {
      throw ConfigError(entries.line, std::string("state.entries: ") + err.what());
    }
  }
  throw ConfigError(kind.line, "state.kind: expected ghz, w, or custom, got '" + kind.value + "'");
}

std::vector<double> parse_list(const std::string& text, int line, const std::string& field) {
  std::vector<double> values;
  std::string body = trim(text);
  if (body.empty()) return values;
  // "start:stop:step" range form
  if (body.find(':') != std::string::npos) {
    std::istringstream stream(body);
    std::string a, b, c;
    if (!std::getline(stream, a, ':') || !std::getline(stream, b, ':') ||
        !std::getline(stream, c))
      throw ConfigError(line, field + ": range must be start:stop:step");
    const double start = parse_number(a, line, field);
    const double stop = parse_number(b, line, field);
    const double step = parse_number(c, line, field);
    if (step <= 0.0) throw ConfigError(line, field + ": range step must be positive");
    for (double v = start; v <= stop + 1e-12; v += step) values.push_back(v);
    return values;
  }
  std::istringstream stream(body);
  std::string token;
  while (std::getline(stream, token, ',')) {
    token = trim(token);
    if (token.empty()) throw ConfigError(line, field + ": empty list entry");
    values.push_back(parse_number(token, line, field));
  }
  return values;
}

}  // namespace

ConfigError::ConfigError(int line, const std::string& message)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
      line_(line) {}

ConfigFile parse_config(const std::string& text, bool allow_unsharp_final) {
  std::vector<Section> sections = split_sections(text);

  Section* state = nullptr;
  Section* alice = nullptr;
  Section* bob = nullptr;
  Section* search = nullptr;
  Section* sweep_section = nullptr;
  std::vector<Section*> charlies;
  for (Section& s : sections) {
    if (s.name == "state") state = &s;
    else if (s.name == "alice") alice = &s;
    else if (s.name == "bob") bob = &s;
    else if (s.name == "charlie") charlies.push_back(&s);
    else if (s.name == "search") search = &s;
    else if (s.name == "sweep") sweep_section = &s;
    else throw ConfigError(s.line, "unknown section [" + s.name + "]");
  }

  ConfigFile out;

  const bool any_scenario = state || alice || bob || !charlies.empty();
  if (any_scenario) {
    if (!state) throw ConfigError(0, "missing [state] section");
    if (!alice) throw ConfigError(0, "missing [alice] section");
    if (!bob) throw ConfigError(0, "missing [bob] section");
    if (charlies.empty()) throw ConfigError(0, "missing [[charlie]] section");

    ScenarioConfig config{state_for(*state), settings_for(*alice, "alice"),
                          settings_for(*bob, "bob"), {}, !allow_unsharp_final};
    int index = 1;
    for (Section* section : charlies) {
      const std::string context = "charlie[" + std::to_string(index) + "]";
      const PartySettings settings = settings_for(*section, context);
      KeyValue& lambda = require_key(*section, "lambda", context);
      const double lam = parse_number(lambda.value, lambda.line, context + ".lambda");
      try {
        config.charlies.push_back({settings, Sharpness(lam)});
      } catch (const std::invalid_argument& err) {
        throw ConfigError(lambda.line, context + ".lambda: " + err.what());
      }
      reject_unused(*section, context);
      ++index;
    }
    reject_unused(*state, "state");
    reject_unused(*alice, "alice");
    reject_unused(*bob, "bob");
    try {
      config.validate();
    } catch (const std::invalid_argument& err) {
      throw ConfigError(0, err.what());
    }
    out.scenario = std::move(config);
  }

  if (search) {
    SearchSpec spec;
    KeyValue& kind = require_key(*search, "kind", "search");
    if (kind.value == "mermin") spec.kind = Inequality::Mermin;
    else if (kind.value == "svetlichny") spec.kind = Inequality::Svetlichny;
    else throw ConfigError(kind.line, "search.kind: expected mermin or svetlichny");

    KeyValue& state_key = require_key(*search, "state", "search");
    if (state_key.value == "ghz") spec.state = StateKind::GHZ;
    else if (state_key.value == "w") spec.state = StateKind::W;
    else throw ConfigError(state_key.line, "search.state: expected ghz or w");

    KeyValue& n_key = require_key(*search, "charlies", "search");
    spec.num_charlies = static_cast<int>(parse_number(n_key.value, n_key.line, "search.charlies"));
    if (spec.num_charlies < 1 || spec.num_charlies > kMaxCharlies)
      throw ConfigError(n_key.line, "search.charlies: out of range");

    if (auto it = search->entries.find("thresholds"); it != search->entries.end()) {
      it->second.used = true;
      spec.thresholds = parse_list(it->second.value, it->second.line, "search.thresholds");
    }
    if (spec.thresholds.size() != static_cast<size_t>(spec.num_charlies) - 1)
      throw ConfigError(search->line,
                        "search.thresholds: need one value per Charlie before the last");

    if (auto it = search->entries.find("angle_mode"); it != search->entries.end()) {
      it->second.used = true;
      if (it->second.value == "free") spec.angle_mode = AngleMode::FreeAngles;
      else if (it->second.value == "fixed") spec.angle_mode = AngleMode::ReferenceAnglesFixed;
      else throw ConfigError(it->second.line, "search.angle_mode: expected free or fixed");
    }
    reject_unused(*search, "search");
    out.search = std::move(spec);
  }

  if (sweep_section) {
    if (!out.scenario) throw ConfigError(sweep_section->line, "[sweep] needs a scenario");
    std::vector<std::vector<double>> grids(out.scenario->charlies.size());
    for (auto& [key, kv] : sweep_section->entries) {
      if (key.rfind("charlie", 0) != 0)
        throw ConfigError(kv.line, "sweep: unknown key '" + key + "'");
      const int idx = std::atoi(key.c_str() + 7);
      if (idx < 1 || idx > static_cast<int>(grids.size()))
        throw ConfigError(kv.line, "sweep: Charlie index out of range in '" + key + "'");
      kv.used = true;
      grids[static_cast<size_t>(idx) - 1] = parse_list(kv.value, kv.line, "sweep." + key);
    }
    out.sweep_grids = std::move(grids);
  }

  return out;
}

ConfigFile load_config(const std::string& path, bool allow_unsharp_final) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), allow_unsharp_final);
}

ScenarioConfig parse_scenario(const std::string& text, bool allow_unsharp_final) {
  ConfigFile file = parse_config(text, allow_unsharp_final);
  if (!file.scenario) throw ConfigError(0, "config has no scenario sections");
  return *std::move(file.scenario);
}

std::string serialize_scenario(const ScenarioConfig& config) {
  std::ostringstream out;
  out.precision(17);
  auto party = [&](const char* header, const PartySettings& s) {
    out << header << "\n";
    out << "theta0 = " << s.setting0.theta << "\n";
    out << "phi0 = " << s.setting0.phi << "\n";
    out << "theta1 = " << s.setting1.theta << "\n";
    out << "phi1 = " << s.setting1.phi << "\n";
  };
  out << "[state]\n";
  switch (config.state.kind) {
    case StateKind::GHZ: out << "kind = ghz\n"; break;
    case StateKind::W: out << "kind = w\n"; break;
    case StateKind::Custom: {
      out << "kind = custom\n";
      out << "entries =";
      const Matrix& m = config.state.matrix.matrix();
      for (Eigen::Index r = 0; r < 8; ++r)
        for (Eigen::Index c = 0; c < 8; ++c)
          out << " " << m(r, c).real() << " " << m(r, c).imag();
      out << "\n";
      break;
    }
  }
  out << "\n";
  party("[alice]", config.alice);
  out << "\n";
  party("[bob]", config.bob);
  for (const CharlieStage& stage : config.charlies) {
    out << "\n";
    party("[[charlie]]", stage.settings);
    out << "lambda = " << stage.sharpness.lambda() << "\n";
  }
  return out.str();
}

}  // namespace trishare
