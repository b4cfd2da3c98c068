#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "comodule/baselines.hpp"
#include "comodule/solver.hpp"
#include "comodule/types.hpp"

namespace comodule {

enum class Scenario { I, II, III, Custom };

Scenario scenario_from_string(const std::string& s);
std::string scenario_name(Scenario s);

/// Planted sign patterns for u, v, w (entries in {-1, 0, +1}).
struct PlantedTruth {
  Vector u, v, w;
};

struct SimSpec {
  Index n = 0, p = 0, q = 0;
  Scenario scenario = Scenario::Custom;
  double snr1 = 0.1, snr2 = 0.1;
  std::uint64_t seed = 0;
};

/// Scenario presets: I = (50, 80, 100), II = (100, 800, 1000),
/// III = (500, 8000, 10000), all at SNR 0.1.
SimSpec scenario_spec(Scenario s, std::uint64_t seed = 0);

/// Default solver budgets per scenario: I = (20, 30, 25), II = (200, 300, 50),
/// III = (2000, 3000, 250).
struct ScenarioBudgets {
  Index k_u, k_v, k_w;
};
ScenarioBudgets scenario_budgets(Scenario s);

/// Sign patterns exactly as defined per scenario; Custom plants
/// max(1, floor(p/8)) of each sign in u, max(1, floor(0.15 q)) of each sign
/// in v, and floor(n/2) ones in w.
PlantedTruth make_truth(const SimSpec& spec);

/// Noise scale solving snr = ||w||^2 ||u||^2 / (gamma^2 n p).
double gamma_for_snr(const Vector& w, const Vector& u, double snr, Index n,
                     Index p);

struct SimulatedPair {
  Matrix X, Y;
  PlantedTruth truth;
  double gamma1 = 0.0, gamma2 = 0.0;
};

/// Rank-1 signal plus scaled i.i.d. standard normal noise:
/// X = w u' + gamma1 E1, Y = w v' + gamma2 E2. Deterministic given spec.seed.
SimulatedPair simulate_pair(const SimSpec& spec);

/// Support estimates to score; methods without sample weights leave w empty
/// and are scored against an all-ones weight vector.
struct SupportEstimate {
  Vector u, v;
  std::optional<Vector> w;
};

struct ConfusionCounts {
  long tp = 0, tn = 0, pos = 0, neg = 0;
};

struct TargetMetrics {
  double tpr = 0.0, tnr = 0.0, acc = 0.0;
  ConfusionCounts counts;
};

struct MetricsReport {
  TargetMetrics u, v, w, all;  // "all" pools the three confusion tables
  double runtime_seconds = 0.0;
};

/// Support-recovery metrics: positives are planted nonzeros, a prediction is
/// positive when the estimated entry is exactly nonzero (the solvers zero by
/// hard projection).
MetricsReport score(const SupportEstimate& estimate, const PlantedTruth& truth);

enum class Method { Pls, PmdSpls, L0Spls, L2L0Wspls, Wspls };

Method method_from_string(const std::string& name);
std::string method_name(Method m);

struct BenchmarkSpec {
  SimSpec sim;
  Index k_u = 0, k_v = 0, k_w = 0;  // zero fields fall back to scenario presets
  int runs = 20;
  int restarts = 5;
  int max_iter = 20;
  double tol = 1e-5;
  double L = 1.0;
  int threads = 1;
};

struct MethodAggregate {
  Method method = Method::Wspls;
  std::vector<MetricsReport> per_run;
  MetricsReport mean, stddev;  // entrywise sample statistics over runs
  std::optional<CalibrationResult> calibration;  // pmd only
};

struct BenchmarkReport {
  BenchmarkSpec spec;
  std::vector<MethodAggregate> methods;
};

/// Fresh data per run (per-run seed = master seed + run index), fit each
/// method with the scenario budgets, score, and aggregate mean / sample
/// stddev per metric plus wall-clock per fit. The generated matrices are fed
/// to the solvers as-is. PMD bounds are calibrated once on the first run's
/// data and reused.
BenchmarkReport run_benchmark(const BenchmarkSpec& spec,
                              const std::vector<Method>& methods);

}  // namespace comodule
