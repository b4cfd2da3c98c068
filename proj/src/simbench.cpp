#include "comodule/simbench.hpp"

#include <chrono>
#include <cmath>

#include "comodule/rng.hpp"
#include "comodule/threading.hpp"

namespace comodule {

Scenario scenario_from_string(const std::string& s) {
  if (s == "I" || s == "i" || s == "1") return Scenario::I;
  if (s == "II" || s == "ii" || s == "2") return Scenario::II;
  if (s == "III" || s == "iii" || s == "3") return Scenario::III;
  if (s == "custom") return Scenario::Custom;
  throw InvalidSpec("unknown scenario '" + s + "'");
}

std::string scenario_name(Scenario s) {
  switch (s) {
    case Scenario::I: return "I";
    case Scenario::II: return "II";
    case Scenario::III: return "III";
    case Scenario::Custom: return "custom";
  }
  return "?";
}

SimSpec scenario_spec(Scenario s, std::uint64_t seed) {
  SimSpec spec;
  spec.scenario = s;
  spec.seed = seed;
  switch (s) {
    case Scenario::I: spec.n = 50; spec.p = 80; spec.q = 100; break;
    case Scenario::II: spec.n = 100; spec.p = 800; spec.q = 1000; break;
    case Scenario::III: spec.n = 500; spec.p = 8000; spec.q = 10000; break;
    case Scenario::Custom:
      throw InvalidSpec("custom scenario requires explicit n, p, q");
  }
  return spec;
}

ScenarioBudgets scenario_budgets(Scenario s) {
  switch (s) {
    case Scenario::I: return {20, 30, 25};
    case Scenario::II: return {200, 300, 50};
    case Scenario::III: return {2000, 3000, 250};
    case Scenario::Custom:
      throw InvalidSpec("custom scenario requires explicit budgets");
  }
  return {0, 0, 0};
}

namespace {

// [ +1 x a | -1 x a | 0 ... ] and friends
Vector sign_pattern(Index len, Index n_pos, Index n_neg, bool neg_first) {
  if (n_pos + n_neg > len)
    throw InvalidSpec("planted support exceeds vector length");
  Vector v = Vector::Zero(len);
  const double first = neg_first ? -1.0 : 1.0;
  for (Index i = 0; i < n_pos; ++i) v[i] = first;
  for (Index i = 0; i < n_neg; ++i) v[n_pos + i] = -first;
  return v;
}

}  // namespace

PlantedTruth make_truth(const SimSpec& spec) {
  Index half_u = 0, half_v = 0, ones_w = 0;
  switch (spec.scenario) {
    case Scenario::I: half_u = 10; half_v = 15; ones_w = 25; break;
    case Scenario::II: half_u = 100; half_v = 150; ones_w = 50; break;
    case Scenario::III: half_u = 1000; half_v = 1500; ones_w = 250; break;
    case Scenario::Custom:
      half_u = std::max<Index>(1, spec.p / 8);
      half_v = std::max<Index>(1, static_cast<Index>(0.15 * double(spec.q)));
      ones_w = std::max<Index>(1, spec.n / 2);
      break;
  }
  PlantedTruth t;
  t.u = sign_pattern(spec.p, half_u, half_u, false);
  t.v = sign_pattern(spec.q, half_v, half_v, true);
  t.w = sign_pattern(spec.n, ones_w, 0, false);
  return t;
}

double gamma_for_snr(const Vector& w, const Vector& u, double snr, Index n,
                     Index p) {
  if (snr <= 0.0) throw InvalidSpec("snr must be positive");
  const double signal = w.squaredNorm() * u.squaredNorm();
  if (signal == 0.0) throw ZeroSignal("planted signal w u' is zero");
  return std::sqrt(signal / (snr * double(n) * double(p)));
}

SimulatedPair simulate_pair(const SimSpec& spec) {
  if (spec.n < 2 || spec.p < 1 || spec.q < 1)
    throw InvalidSpec("simulate_pair: need n >= 2, p >= 1, q >= 1");
  SimulatedPair out;
  out.truth = make_truth(spec);
  out.gamma1 = gamma_for_snr(out.truth.w, out.truth.u, spec.snr1, spec.n, spec.p);
  out.gamma2 = gamma_for_snr(out.truth.w, out.truth.v, spec.snr2, spec.n, spec.q);

  auto rng = make_rng(spec.seed, 0);
  out.X = out.truth.w * out.truth.u.transpose() +
          out.gamma1 * normal_matrix(rng, spec.n, spec.p);
  out.Y = out.truth.w * out.truth.v.transpose() +
          out.gamma2 * normal_matrix(rng, spec.n, spec.q);
  return out;
}

namespace {

TargetMetrics confusion(const Vector& estimate, const Vector& truth) {
  if (estimate.size() != truth.size())
    throw LengthMismatch("score: estimate/truth length mismatch");
  TargetMetrics m;
  for (Index i = 0; i < truth.size(); ++i) {
    const bool t = truth[i] != 0.0;
    const bool e = estimate[i] != 0.0;
    m.counts.pos += t;
    m.counts.neg += !t;
    m.counts.tp += (t && e);
    m.counts.tn += (!t && !e);
  }
  m.tpr = m.counts.pos ? double(m.counts.tp) / double(m.counts.pos) : 1.0;
  m.tnr = m.counts.neg ? double(m.counts.tn) / double(m.counts.neg) : 1.0;
  m.acc = double(m.counts.tp + m.counts.tn) /
          double(m.counts.pos + m.counts.neg);
  return m;
}

}  // namespace

MetricsReport score(const SupportEstimate& estimate, const PlantedTruth& truth) {
  MetricsReport r;
  r.u = confusion(estimate.u, truth.u);
  r.v = confusion(estimate.v, truth.v);
  // methods without a weight estimate are scored with w-hat = all-ones
  r.w = confusion(estimate.w ? *estimate.w : Vector::Ones(truth.w.size()),
                  truth.w);
  r.all.counts.tp = r.u.counts.tp + r.v.counts.tp + r.w.counts.tp;
  r.all.counts.tn = r.u.counts.tn + r.v.counts.tn + r.w.counts.tn;
  r.all.counts.pos = r.u.counts.pos + r.v.counts.pos + r.w.counts.pos;
  r.all.counts.neg = r.u.counts.neg + r.v.counts.neg + r.w.counts.neg;
  r.all.tpr = double(r.all.counts.tp) / double(r.all.counts.pos);
  r.all.tnr = double(r.all.counts.tn) / double(r.all.counts.neg);
  r.all.acc = double(r.all.counts.tp + r.all.counts.tn) /
              double(r.all.counts.pos + r.all.counts.neg);
  return r;
}

Method method_from_string(const std::string& name) {
  if (name == "pls") return Method::Pls;
  if (name == "pmd" || name == "pmdspls") return Method::PmdSpls;
  if (name == "l0spls") return Method::L0Spls;
  if (name == "l2l0") return Method::L2L0Wspls;
  if (name == "wspls") return Method::Wspls;
  throw InvalidSpec("unknown method '" + name + "'");
}

std::string method_name(Method m) {
  switch (m) {
    case Method::Pls: return "pls";
    case Method::PmdSpls: return "pmd";
    case Method::L0Spls: return "l0spls";
    case Method::L2L0Wspls: return "l2l0";
    case Method::Wspls: return "wspls";
  }
  return "?";
}

namespace {

struct RunOutcome {
  MetricsReport metrics;
};

MetricsReport fit_and_score(Method m, const SimulatedPair& pair,
                            const BenchmarkSpec& bspec, std::uint64_t run_seed,
                            const std::optional<CalibrationResult>& calib) {
  SolverConfig cfg;
  cfg.k_u = bspec.k_u;
  cfg.k_v = bspec.k_v;
  cfg.k_w = bspec.k_w;
  cfg.L_u = cfg.L_v = cfg.L_w = bspec.L;
  cfg.max_iter = bspec.max_iter;
  cfg.tol = bspec.tol;
  cfg.restarts = bspec.restarts;
  cfg.seed = run_seed;

  // Generated matrices go in as-is; see run_benchmark docs.
  const Standardized X = Standardized::given(pair.X);
  const Standardized Y = Standardized::given(pair.Y);

  SupportEstimate est;
  const auto t0 = std::chrono::steady_clock::now();
  switch (m) {
    case Method::Pls: {
      PairSolution s = pls_rank1(pair.X, pair.Y, 1000, 1e-9, run_seed);
      est.u = std::move(s.u);
      est.v = std::move(s.v);
      break;
    }
    case Method::PmdSpls: {
      PairSolution s = pmd_spls(X, Y, calib->c1, calib->c2, cfg);
      est.u = std::move(s.u);
      est.v = std::move(s.v);
      break;
    }
    case Method::L0Spls: {
      PairSolution s = l0_spls(X, Y, bspec.k_u, bspec.k_v, cfg);
      est.u = std::move(s.u);
      est.v = std::move(s.v);
      break;
    }
    case Method::L2L0Wspls: {
      WsplsSolution s = fit_l2_variant(X, Y, cfg);
      est.u = std::move(s.u.values);
      est.v = std::move(s.v.values);
      est.w = std::move(s.w.values);
      break;
    }
    case Method::Wspls: {
      WsplsSolution s = fit(X, Y, cfg);
      est.u = std::move(s.u.values);
      est.v = std::move(s.v.values);
      est.w = std::move(s.w.values);
      break;
    }
  }
  const auto t1 = std::chrono::steady_clock::now();

  MetricsReport r = score(est, pair.truth);
  r.runtime_seconds = std::chrono::duration<double>(t1 - t0).count();
  return r;
}

void accumulate(TargetMetrics MetricsReport::*field, double TargetMetrics::*val,
                const std::vector<MetricsReport>& runs, MetricsReport& mean,
                MetricsReport& stddev) {
  double m = 0.0;
  for (const auto& r : runs) m += r.*field.*val;
  m /= double(runs.size());
  double ss = 0.0;
  for (const auto& r : runs) {
    const double d = r.*field.*val - m;
    ss += d * d;
  }
  mean.*field.*val = m;
  stddev.*field.*val =
      runs.size() > 1 ? std::sqrt(ss / double(runs.size() - 1)) : 0.0;
}

}  // namespace

BenchmarkReport run_benchmark(const BenchmarkSpec& spec_in,
                              const std::vector<Method>& methods) {
  BenchmarkSpec spec = spec_in;
  if (spec.runs < 1) throw InvalidSpec("run_benchmark: runs must be >= 1");
  if (spec.sim.scenario != Scenario::Custom) {
    const auto b = scenario_budgets(spec.sim.scenario);
    if (spec.k_u == 0) spec.k_u = b.k_u;
    if (spec.k_v == 0) spec.k_v = b.k_v;
    if (spec.k_w == 0) spec.k_w = b.k_w;
  }
  if (spec.k_u == 0 || spec.k_v == 0 || spec.k_w == 0)
    throw InvalidSpec("run_benchmark: budgets required for custom scenarios");

  BenchmarkReport report;
  report.spec = spec;

  // PMD l1 bounds: calibrated once against the scenario sparsity targets on
  // the first run's data, then reused across runs.
  std::optional<CalibrationResult> calib;
  for (Method m : methods) {
    if (m != Method::PmdSpls) continue;
    SimSpec s0 = spec.sim;
    s0.seed = spec.sim.seed;  // run 0 seed
    SimulatedPair pair = simulate_pair(s0);
    SolverConfig cfg;
    cfg.max_iter = spec.max_iter;
    cfg.tol = spec.tol;
    cfg.restarts = spec.restarts;
    cfg.seed = spec.sim.seed;
    calib = calibrate_c(Standardized::given(pair.X), Standardized::given(pair.Y),
                        spec.k_u, spec.k_v, cfg);
  }

  for (Method m : methods) {
    MethodAggregate agg;
    agg.method = m;
    agg.calibration = m == Method::PmdSpls ? calib : std::nullopt;
    agg.per_run.resize(static_cast<std::size_t>(spec.runs));
    parallel_for(static_cast<std::size_t>(spec.runs), spec.threads,
                 [&](std::size_t run) {
                   SimSpec s = spec.sim;
                   s.seed = spec.sim.seed + run;
                   SimulatedPair pair = simulate_pair(s);
                   agg.per_run[run] = fit_and_score(m, pair, spec, s.seed, calib);
                 });

    for (auto field : {&MetricsReport::u, &MetricsReport::v, &MetricsReport::w,
                       &MetricsReport::all}) {
      for (auto val : {&TargetMetrics::tpr, &TargetMetrics::tnr,
                       &TargetMetrics::acc}) {
        accumulate(field, val, agg.per_run, agg.mean, agg.stddev);
      }
    }
    double tm = 0.0;
    for (const auto& r : agg.per_run) tm += r.runtime_seconds;
    agg.mean.runtime_seconds = tm / double(spec.runs);
    double ss = 0.0;
    for (const auto& r : agg.per_run) {
      const double d = r.runtime_seconds - agg.mean.runtime_seconds;
      ss += d * d;
    }
    agg.stddev.runtime_seconds =
        spec.runs > 1 ? std::sqrt(ss / double(spec.runs - 1)) : 0.0;
    report.methods.push_back(std::move(agg));
  }
  return report;
}

}  // namespace comodule
