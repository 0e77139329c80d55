// SPDX-License-Identifier: Apache-2.0

#include "trishare/search.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

namespace trishare {

namespace {

constexpr double kPenaltyWeight = 1e3;
// Constraints are targeted above the stated threshold by more than the
// penalty equilibrium deficit (~|dV/dC| / 2e3), so boundary optima
// re-evaluate as feasible.
constexpr double kConstraintCushion = 5e-4;
constexpr double kLambdaFloor = 1e-6;

using Eigen::VectorXd;

struct Bounds {
  VectorXd lo;
  VectorXd hi;
};

// Triangle-wave fold of x into [lo, hi] (reflection at the boundaries).
double fold(double x, double lo, double hi) {
  const double width = hi - lo;
  if (width <= 0.0) return lo;
  double t = std::fmod(x - lo, 2.0 * width);
  if (t < 0.0) t += 2.0 * width;
  return t <= width ? lo + t : hi - (t - width);
}

int angle_count(const SearchSpec& spec) {
  return spec.angle_mode == AngleMode::FreeAngles ? 4 * (2 + spec.num_charlies) : 0;
}

int dimension(const SearchSpec& spec) { return angle_count(spec) + spec.num_charlies - 1; }

Bounds make_bounds(const SearchSpec& spec) {
  const int d = dimension(spec);
  Bounds b{VectorXd::Zero(d), VectorXd::Zero(d)};
  const int angles = angle_count(spec);
  for (int i = 0; i < angles; ++i) {
    const bool is_phi = (i % 2) == 1;
    b.lo(i) = 0.0;
    b.hi(i) = is_phi ? 2.0 * M_PI : M_PI;
  }
  for (int i = angles; i < d; ++i) {
    b.lo(i) = kLambdaFloor;
    b.hi(i) = 1.0;
  }
  return b;
}

VectorXd fold_into(const VectorXd& x, const Bounds& b) {
  VectorXd out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out(i) = fold(x(i), b.lo(i), b.hi(i));
  return out;
}

ScenarioConfig decode(const SearchSpec& spec, const VectorXd& folded) {
  const int n = spec.num_charlies;
  ScenarioConfig config{InitialState::of_kind(spec.state),
                        reference_settings(spec.kind, Party::Alice),
                        reference_settings(spec.kind, Party::Bob),
                        {},
                        true};
  auto party_at = [&](int offset) {
    return PartySettings{BlochDirection{folded(offset), folded(offset + 1)},
                         BlochDirection{folded(offset + 2), folded(offset + 3)}};
  };
  const PartySettings ref_charlie = reference_settings(spec.kind, Party::Charlie);
  std::vector<PartySettings> charlie_settings(static_cast<size_t>(n), ref_charlie);
  if (spec.angle_mode == AngleMode::FreeAngles) {
    config.alice = party_at(0);
    config.bob = party_at(4);
    for (int m = 0; m < n; ++m) charlie_settings[static_cast<size_t>(m)] = party_at(8 + 4 * m);
  }
  const int angles = angle_count(spec);
  for (int m = 0; m < n; ++m) {
    const double lam = m + 1 < n ? folded(angles + m) : 1.0;
    config.charlies.push_back({charlie_settings[static_cast<size_t>(m)], Sharpness(lam)});
  }
  return config;
}

// Penalty-augmented objective, to be maximized.
double score_values(const SearchSpec& spec, const std::vector<double>& values) {
  double penalty = 0.0;
  for (size_t m = 0; m + 1 < values.size(); ++m) {
    const double deficit = (spec.thresholds[m] + kConstraintCushion) - values[m];
    if (deficit > 0.0) penalty += deficit * deficit;
  }
  return values.back() - kPenaltyWeight * penalty;
}

struct Objective {
  const SearchSpec& spec;
  const Bounds& bounds;
  long evals = 0;

  // Minimization view of the penalized score.
  double operator()(const VectorXd& x) {
    ++evals;
    const ScenarioConfig config = decode(spec, fold_into(x, bounds));
    return -score_values(spec, inequality_values(config, spec.kind));
  }
};

struct NelderMeadOutcome {
  VectorXd x;
  double value = std::numeric_limits<double>::infinity();
};

NelderMeadOutcome nelder_mead(Objective& f, const VectorXd& x0, const VectorXd& steps,
                              long max_evals) {
  const int d = static_cast<int>(x0.size());
  const double alpha = 1.0;
  const double beta = 1.0 + 2.0 / d;
  const double gamma = 0.75 - 0.5 / d;
  const double delta = 1.0 - 1.0 / d;

  std::vector<VectorXd> xs(static_cast<size_t>(d) + 1, x0);
  std::vector<double> fs(static_cast<size_t>(d) + 1);
  long used = 0;
  fs[0] = f(x0);
  ++used;
  for (int i = 0; i < d; ++i) {
    xs[static_cast<size_t>(i) + 1](i) += steps(i);
    fs[static_cast<size_t>(i) + 1] = f(xs[static_cast<size_t>(i) + 1]);
    ++used;
  }

  std::vector<int> order(static_cast<size_t>(d) + 1);
  while (used + 2 < max_evals) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return fs[static_cast<size_t>(a)] < fs[static_cast<size_t>(b)]; });
    const int best = order[0];
    const int worst = order[static_cast<size_t>(d)];
    const int second_worst = order[static_cast<size_t>(d) - 1];

    if (fs[static_cast<size_t>(worst)] - fs[static_cast<size_t>(best)] < 1e-12) break;

    VectorXd centroid = VectorXd::Zero(d);
    for (int i = 0; i <= d; ++i)
      if (i != worst) centroid += xs[static_cast<size_t>(i)];
    centroid /= d;

    const VectorXd reflected = centroid + alpha * (centroid - xs[static_cast<size_t>(worst)]);
    const double fr = f(reflected);
    ++used;
    if (fr < fs[static_cast<size_t>(best)]) {
      const VectorXd expanded = centroid + beta * (reflected - centroid);
      const double fe = f(expanded);
      ++used;
      if (fe < fr) {
        xs[static_cast<size_t>(worst)] = expanded;
        fs[static_cast<size_t>(worst)] = fe;
      } else {
        xs[static_cast<size_t>(worst)] = reflected;
        fs[static_cast<size_t>(worst)] = fr;
      }
    } else if (fr < fs[static_cast<size_t>(second_worst)]) {
      xs[static_cast<size_t>(worst)] = reflected;
      fs[static_cast<size_t>(worst)] = fr;
    } else {
      const bool outside = fr < fs[static_cast<size_t>(worst)];
      const VectorXd contracted =
          outside ? VectorXd(centroid + gamma * (reflected - centroid))
                  : VectorXd(centroid - gamma * (centroid - xs[static_cast<size_t>(worst)]));
      const double fc = f(contracted);
      ++used;
      if (fc < std::min(fr, fs[static_cast<size_t>(worst)])) {
        xs[static_cast<size_t>(worst)] = contracted;
        fs[static_cast<size_t>(worst)] = fc;
      } else {
        for (int i = 0; i <= d; ++i) {
          if (i == best) continue;
          xs[static_cast<size_t>(i)] =
              xs[static_cast<size_t>(best)] +
              delta * (xs[static_cast<size_t>(i)] - xs[static_cast<size_t>(best)]);
          fs[static_cast<size_t>(i)] = f(xs[static_cast<size_t>(i)]);
          ++used;
          if (used + 2 >= max_evals) break;
        }
      }
    }
  }

  NelderMeadOutcome out;
  for (int i = 0; i <= d; ++i) {
    if (fs[static_cast<size_t>(i)] < out.value) {
      out.value = fs[static_cast<size_t>(i)];
      out.x = xs[static_cast<size_t>(i)];
    }
  }
  return out;
}

// Coordinate-wise golden-section refinement inside the bounds.
void golden_polish(Objective& f, const Bounds& bounds, VectorXd& x, double& fx, int passes,
                   double window_fraction, long max_evals) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int pass = 0; pass < passes; ++pass) {
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if (f.evals + 44 > max_evals) return;
      const double range = bounds.hi(i) - bounds.lo(i);
      const double window = window_fraction * range;
      double a = std::max(bounds.lo(i), x(i) - window);
      double b = std::min(bounds.hi(i), x(i) + window);
      double c = b - invphi * (b - a);
      double d = a + invphi * (b - a);
      VectorXd probe = x;
      probe(i) = c;
      double fc = f(probe);
      probe(i) = d;
      double fd = f(probe);
      for (int it = 0; it < 40 && (b - a) > 1e-10 * std::max(1.0, range); ++it) {
        if (fc < fd) {
          b = d;
          d = c;
          fd = fc;
          c = b - invphi * (b - a);
          probe(i) = c;
          fc = f(probe);
        } else {
          a = c;
          c = d;
          fc = fd;
          d = a + invphi * (b - a);
          probe(i) = d;
          fd = f(probe);
        }
      }
      const double candidate = fc < fd ? c : d;
      probe(i) = candidate;
      const double fbest = std::min(fc, fd);
      if (fbest < fx) {
        x = probe;
        fx = fbest;
      }
    }
  }
}

// Chain-solved sharpness schedule when the thresholds admit one; a flat
// fallback otherwise.
std::vector<double> seed_lambdas(const SearchSpec& spec, double fallback) {
  std::vector<double> lams(static_cast<size_t>(spec.num_charlies) - 1, fallback);
  try {
    const ChainResult chain = analytic_chain(spec.kind, spec.thresholds);
    for (size_t i = 0; i + 1 < chain.lambdas.size(); ++i)
      lams[i] = std::clamp(chain.lambdas[i], kLambdaFloor, 1.0);
  } catch (const std::exception&) {
    // keep fallback
  }
  return lams;
}

VectorXd encode_config(const SearchSpec& spec, const ScenarioConfig& config) {
  const int d = dimension(spec);
  const int n = spec.num_charlies;
  VectorXd x = VectorXd::Zero(d);
  const int angles = angle_count(spec);
  if (spec.angle_mode == AngleMode::FreeAngles) {
    auto put_party = [&](int offset, const PartySettings& s) {
      x(offset) = s.setting0.theta;
      x(offset + 1) = s.setting0.phi;
      x(offset + 2) = s.setting1.theta;
      x(offset + 3) = s.setting1.phi;
    };
    put_party(0, config.alice);
    put_party(4, config.bob);
    for (int m = 0; m < n; ++m) {
      const size_t src = std::min(static_cast<size_t>(m), config.charlies.size() - 1);
      put_party(8 + 4 * m, config.charlies[src].settings);
    }
  }
  for (int m = 0; m + 1 < n; ++m) {
    const double lam = m < static_cast<int>(config.charlies.size()) - 1
                           ? config.charlies[static_cast<size_t>(m)].sharpness.lambda()
                           : 0.85;
    x(angles + m) = std::clamp(lam == 1.0 ? 0.85 : lam, kLambdaFloor, 1.0);
  }
  return x;
}

VectorXd reference_start(const SearchSpec& spec, double lambda_fill, bool chain_lambdas) {
  ScenarioConfig config = reference_scenario(
      spec.kind, spec.state,
      std::vector<double>(static_cast<size_t>(spec.num_charlies) - 1, lambda_fill));
  VectorXd x = encode_config(spec, config);
  const int angles = angle_count(spec);
  const std::vector<double> lams =
      chain_lambdas ? seed_lambdas(spec, lambda_fill)
                    : std::vector<double>(static_cast<size_t>(spec.num_charlies) - 1, lambda_fill);
  for (size_t m = 0; m < lams.size(); ++m) x(angles + static_cast<int>(m)) = lams[m];
  return x;
}

VectorXd random_start(const SearchSpec& spec, const Bounds& bounds, std::uint64_t index) {
  std::mt19937_64 rng = rng_stream(spec.seed, "search-start", index);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int angles = angle_count(spec);
  VectorXd x(bounds.lo.size());
  const bool planar = (index % 2) == 0;
  for (int i = 0; i < angles; ++i) {
    const bool is_phi = (i % 2) == 1;
    if (is_phi && planar)
      x(i) = unit(rng) < 0.5 ? 0.0 : M_PI;
    else
      x(i) = bounds.lo(i) + unit(rng) * (bounds.hi(i) - bounds.lo(i));
  }
  for (Eigen::Index i = angles; i < x.size(); ++i) x(i) = 0.3 + 0.7 * unit(rng);
  return x;
}

}  // namespace

std::mt19937_64 rng_stream(std::uint64_t seed, std::string_view label, std::uint64_t index) {
  std::uint64_t h = 1469598103934665603ull;
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  };
  return std::mt19937_64(mix(mix(seed ^ h) + index));
}

void SearchSpec::validate() const {
  if (num_charlies < 1 || num_charlies > kMaxCharlies)
    throw std::invalid_argument("search: number of Charlies out of range");
  if (thresholds.size() != static_cast<size_t>(num_charlies) - 1)
    throw std::invalid_argument("search: need one threshold per Charlie before the last");
  if (budget < 1) throw std::invalid_argument("search: budget must be positive");
  if (restarts < 1) throw std::invalid_argument("search: restarts must be positive");
  if (feasibility_margin < 0.0)
    throw std::invalid_argument("search: feasibility margin must be non-negative");
}

SearchResult optimize(const SearchSpec& spec) { return optimize(spec, {}); }

SearchResult optimize(const SearchSpec& spec, const std::vector<ScenarioConfig>& warm_starts) {
  spec.validate();
  const Bounds bounds = make_bounds(spec);
  const int d = dimension(spec);
  Objective objective{spec, bounds};

  VectorXd best_x;
  double best_f = std::numeric_limits<double>::infinity();

  if (d == 0) {
    best_x = VectorXd::Zero(0);
    best_f = objective(best_x);
  } else {
    // Start roster: chain-seeded reference, flat reference, warm starts,
    // then seeded planar/random points up to the restart count.
    std::vector<VectorXd> starts;
    starts.push_back(reference_start(spec, 0.85, true));
    if (spec.restarts > 1) starts.push_back(reference_start(spec, 0.7, false));
    for (const ScenarioConfig& warm : warm_starts)
      if (static_cast<int>(starts.size()) < spec.restarts + static_cast<int>(warm_starts.size()))
        starts.push_back(encode_config(spec, warm));
    std::uint64_t random_index = 0;
    while (static_cast<int>(starts.size()) <
           spec.restarts + static_cast<int>(warm_starts.size()))
      starts.push_back(random_start(spec, bounds, random_index++));

    const long polish_budget = std::clamp(spec.budget / 10, long{100}, long{6000});
    const long per_start =
        std::max(long{150}, (spec.budget - polish_budget) / static_cast<long>(starts.size()));

    VectorXd steps(d);
    for (int i = 0; i < d; ++i) steps(i) = 0.2 * (bounds.hi(i) - bounds.lo(i));

    best_x = starts.front();
    best_f = objective(best_x);
    for (const VectorXd& x0 : starts) {
      const long quota = std::min(per_start, spec.budget - objective.evals);
      if (quota < d + 2) break;
      const NelderMeadOutcome run = nelder_mead(objective, x0, steps, quota);
      if (run.value < best_f) {
        best_f = run.value;
        best_x = run.x;
      }
    }

    best_x = fold_into(best_x, bounds);
    golden_polish(objective, bounds, best_x, best_f, 1, 0.08, spec.budget);
    golden_polish(objective, bounds, best_x, best_f, 1, 0.005, spec.budget);
  }

  ScenarioConfig best_config = decode(spec, fold_into(best_x, bounds));
  std::vector<double> values = inequality_values(best_config, spec.kind);
  bool feasible = values.back() >= classical_bound(spec.kind) + spec.feasibility_margin;
  for (size_t m = 0; m + 1 < values.size(); ++m)
    if (values[m] < spec.thresholds[m]) feasible = false;
  return SearchResult{values.back(), std::move(best_config), feasible, objective.evals,
                      std::move(values)};
}

int max_observers(Inequality kind, StateKind state, double margin, long budget_per_n,
                  int restarts, std::uint64_t seed) {
  int count = 0;
  std::vector<ScenarioConfig> warm;
  for (int n = 1; n <= kMaxCharlies; ++n) {
    SearchSpec spec;
    spec.kind = kind;
    spec.state = state;
    spec.num_charlies = n;
    spec.thresholds.assign(static_cast<size_t>(n) - 1, classical_bound(kind) + margin);
    spec.angle_mode = AngleMode::FreeAngles;
    spec.budget = budget_per_n;
    spec.restarts = restarts;
    spec.seed = seed;
    spec.feasibility_margin = margin;
    const SearchResult result = optimize(spec, warm);
    if (!result.feasible) break;
    count = n;
    warm.assign(1, result.best_config);
  }
  return count;
}

SharpnessWindow sharpness_window() {
  auto chain_value = [](double lambda, int m) {
    const ScenarioConfig config =
        reference_scenario(Inequality::Svetlichny, StateKind::GHZ, {lambda});
    return svetlichny_value(config, m);
  };
  auto bisect = [](const std::function<double(double)>& f, double lo, double hi) {
    double flo = f(lo);
    for (int it = 0; it < 60 && hi - lo > 1e-7; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double fmid = f(mid);
      if ((flo <= 0.0) == (fmid <= 0.0)) {
        lo = mid;
        flo = fmid;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  };
  SharpnessWindow window;
  // S1 grows with lambda1; S2 shrinks with it.
  window.lambda_low = bisect([&](double l) { return chain_value(l, 1) - 4.0; }, 0.5, 1.0);
  window.lambda_high = bisect([&](double l) { return 4.0 - chain_value(l, 2); }, 0.5, 1.0);
  return window;
}

std::vector<SweepRow> sweep(const ScenarioConfig& prototype,
                            const std::vector<std::vector<double>>& lambda_grids, long budget) {
  prototype.validate();
  const int n = prototype.num_charlies();
  if (lambda_grids.size() != static_cast<size_t>(n))
    throw std::invalid_argument("sweep: one lambda grid per Charlie required (grids may be empty)");

  long total = 1;
  for (const auto& grid : lambda_grids) {
    const long size = std::max<long>(1, static_cast<long>(grid.size()));
    if (total > budget / size + 1) {
      total = budget + 1;
      break;
    }
    total *= size;
  }
  if (total > budget) throw std::runtime_error("sweep budget exceeded");

  std::vector<SweepRow> rows;
  std::vector<size_t> counter(static_cast<size_t>(n), 0);
  for (long id = 0; id < total; ++id) {
    ScenarioConfig config = prototype;
    config.require_sharp_final = false;
    for (int m = 0; m < n; ++m) {
      const auto& grid = lambda_grids[static_cast<size_t>(m)];
      if (!grid.empty())
        config.charlies[static_cast<size_t>(m)].sharpness = Sharpness(grid[counter[static_cast<size_t>(m)]]);
    }
    const InequalityReport report = evaluate(config);
    for (const CharlieResult& cr : report.charlies)
      rows.push_back(SweepRow{id, cr.m, cr.lambda, cr.mermin, cr.svetlichny, cr.correlations});

    // mixed-radix increment, last Charlie fastest
    for (int m = n - 1; m >= 0; --m) {
      const size_t size = std::max<size_t>(1, lambda_grids[static_cast<size_t>(m)].size());
      counter[static_cast<size_t>(m)] = (counter[static_cast<size_t>(m)] + 1) % size;
      if (counter[static_cast<size_t>(m)] != 0) break;
    }
  }
  return rows;
}

}  // namespace trishare
