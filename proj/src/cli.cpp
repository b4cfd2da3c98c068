#include "comodule/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "comodule/baselines.hpp"
#include "comodule/comodules.hpp"
#include "comodule/core.hpp"
#include "comodule/csv.hpp"
#include "comodule/multiview.hpp"
#include "comodule/simbench.hpp"
#include "comodule/solver.hpp"

namespace comodule {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------- helpers

json to_json(const Vector& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Vector vector_from_json(const json& a) {
  Vector v(static_cast<Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<Index>(i)] = a[i].get<double>();
  return v;
}

json to_json(const std::vector<Index>& idx) {
  json a = json::array();
  for (Index i : idx) a.push_back(i);
  return a;
}

json factor_json(const Vector& values, const std::vector<Index>& support,
                 Index budget) {
  return json{{"values", to_json(values)},
              {"support", to_json(support)},
              {"budget", budget}};
}

std::vector<Index> support_of(const Vector& v) {
  std::vector<Index> s;
  for (Index i = 0; i < v.size(); ++i)
    if (v[i] != 0.0) s.push_back(i);
  return s;
}

std::uint64_t resolve_seed(std::uint64_t flag_seed) {
  if (const char* env = std::getenv("COMODULE_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw InvalidSpec("COMODULE_SEED must be an unsigned integer");
    }
  }
  return flag_seed;
}

// --kw accepts an absolute count or a fraction of n (values below 1).
Index resolve_weight_budget(double kw, Index n) {
  if (kw <= 0.0) throw InvalidSpec("--kw must be positive");
  if (kw < 1.0) return static_cast<Index>(std::floor(kw * double(n)));
  const double rounded = std::floor(kw);
  if (rounded != kw) throw InvalidSpec("--kw above 1 must be an integer count");
  return static_cast<Index>(rounded);
}

enum class StandardizeMode { Sample, Population, None };

StandardizeMode standardize_mode(const std::string& s) {
  if (s == "sample") return StandardizeMode::Sample;
  if (s == "population") return StandardizeMode::Population;
  if (s == "none") return StandardizeMode::None;
  throw InvalidSpec("--standardize must be sample, population, or none");
}

Standardized prepare(const Matrix& m, StandardizeMode mode) {
  switch (mode) {
    case StandardizeMode::Sample:
      return standardize_columns(m, ScaleConvention::SampleVariance);
    case StandardizeMode::Population:
      return standardize_columns(m, ScaleConvention::PopulationVariance);
    case StandardizeMode::None:
      return Standardized::given(m);
  }
  throw InvalidSpec("unreachable");
}

json manifest_json(const std::string& command,
                   const std::vector<std::string>& argv, const json& config,
                   const std::vector<fs::path>& inputs) {
  json inputs_json = json::object();
  for (const auto& in : inputs) inputs_json[in.string()] = file_digest(in);
  return json{{"artifact_version", kArtifactVersion},
              {"command", command},
              {"argv", argv},
              {"config", config},
              {"inputs", inputs_json},
              {"index_base", 0}};
}

void write_json(const fs::path& path, const json& j) {
  write_text_atomic(path, j.dump(2) + "\n");
}

std::vector<std::string> split_csv_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

// ------------------------------------------------------------- subcommands

struct SimulateArgs {
  std::string scenario = "I";
  Index n = 0, p = 0, q = 0;
  double snr = 0.1, snr1 = -1.0, snr2 = -1.0;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_simulate(const SimulateArgs& a, const std::vector<std::string>& argv) {
  const Scenario scn = scenario_from_string(a.scenario);
  SimSpec spec;
  if (scn == Scenario::Custom) {
    if (a.n < 2 || a.p < 1 || a.q < 1)
      throw InvalidSpec("custom scenario requires --n >= 2, --p >= 1, --q >= 1");
    spec.n = a.n;
    spec.p = a.p;
    spec.q = a.q;
    spec.scenario = Scenario::Custom;
  } else {
    spec = scenario_spec(scn);
    if (a.n > 0 || a.p > 0 || a.q > 0)
      throw InvalidSpec("--n/--p/--q only apply to --scenario custom");
  }
  spec.snr1 = a.snr1 > 0 ? a.snr1 : a.snr;
  spec.snr2 = a.snr2 > 0 ? a.snr2 : a.snr;
  spec.seed = resolve_seed(a.seed);

  SimulatedPair pair = simulate_pair(spec);

  const fs::path dir(a.out);
  fs::create_directories(dir);
  write_csv(dir / "X.csv", pair.X);
  write_csv(dir / "Y.csv", pair.Y);

  json config{{"scenario", scenario_name(spec.scenario)},
              {"n", spec.n},
              {"p", spec.p},
              {"q", spec.q},
              {"snr1", spec.snr1},
              {"snr2", spec.snr2},
              {"seed", spec.seed}};
  json truth{{"index_base", 0},
             {"scenario", scenario_name(spec.scenario)},
             {"n", spec.n},
             {"p", spec.p},
             {"q", spec.q},
             {"snr1", spec.snr1},
             {"snr2", spec.snr2},
             {"gamma1", pair.gamma1},
             {"gamma2", pair.gamma2},
             {"u", to_json(pair.truth.u)},
             {"v", to_json(pair.truth.v)},
             {"w", to_json(pair.truth.w)},
             {"u_support", to_json(support_of(pair.truth.u))},
             {"v_support", to_json(support_of(pair.truth.v))},
             {"w_support", to_json(support_of(pair.truth.w))},
             {"manifest", manifest_json("simulate", argv, config,
                                        {dir / "X.csv", dir / "Y.csv"})}};
  write_json(dir / "truth.json", truth);
  std::cout << "wrote " << (dir / "X.csv").string() << ", "
            << (dir / "Y.csv").string() << ", " << (dir / "truth.json").string()
            << "\n";
  return 0;
}

struct FitArgs {
  std::string method = "wspls";
  std::vector<std::string> data;
  Index ku = 0, kv = 0;
  double kw = 0.0;
  std::vector<Index> k;  // per-view budgets for multiview
  std::string scheme = "sum";
  double c1 = 0.0, c2 = 0.0;  // explicit pmd bounds (otherwise calibrated)
  int restarts = 5, max_iter = 20;
  double tol = 1e-5, L = 1.0;
  std::string stop_rule = "both";
  std::string standardize = "sample";
  std::uint64_t seed = 0;
  std::string out;
};

StopRule stop_rule_from_string(const std::string& s) {
  if (s == "iterate") return StopRule::IterateChange;
  if (s == "objective") return StopRule::ObjectiveChange;
  if (s == "both") return StopRule::Both;
  throw InvalidSpec("--stop-rule must be iterate, objective, or both");
}

int cmd_fit(const FitArgs& a, const std::vector<std::string>& argv) {
  if (a.data.size() < 2) throw InvalidSpec("fit needs at least two --data files");
  const StandardizeMode mode = standardize_mode(a.standardize);

  std::vector<CsvMatrix> raw;
  raw.reserve(a.data.size());
  for (const auto& path : a.data) raw.push_back(read_csv(path));

  const bool multiview = a.method == "mwspls";
  if (!multiview && a.data.size() != 2)
    throw InvalidSpec("pairwise methods take exactly two --data files");

  const Index n = raw[0].data.rows();
  for (const auto& m : raw)
    if (m.data.rows() != n)
      throw IncompatibleFiles("data files disagree on the number of rows");

  json config{{"method", a.method},
              {"data", a.data},
              {"standardize", a.standardize},
              {"restarts", a.restarts},
              {"max_iter", a.max_iter},
              {"tol", a.tol},
              {"L", a.L},
              {"stop_rule", a.stop_rule},
              {"seed", resolve_seed(a.seed)}};

  json out;
  out["index_base"] = 0;
  out["method"] = a.method;
  out["n"] = n;

  SolverConfig cfg;
  cfg.L_u = cfg.L_v = cfg.L_w = a.L;
  cfg.max_iter = a.max_iter;
  cfg.tol = a.tol;
  cfg.restarts = a.restarts;
  cfg.seed = resolve_seed(a.seed);
  cfg.stop_rule = stop_rule_from_string(a.stop_rule);

  if (multiview) {
    if (a.k.size() != a.data.size())
      throw InvalidSpec("mwspls needs one --k per --data file");
    MultiViewData data;
    for (const auto& m : raw) data.views.push_back(prepare(m.data, mode));
    MultiViewConfig mcfg;
    mcfg.budgets = a.k;
    mcfg.k_w = resolve_weight_budget(a.kw, n);
    mcfg.L_u = mcfg.L_w = a.L;
    mcfg.max_iter = a.max_iter;
    mcfg.tol = a.tol;
    mcfg.restarts = a.restarts;
    mcfg.seed = cfg.seed;
    config["k"] = a.k;
    config["kw"] = mcfg.k_w;
    config["scheme"] = a.scheme;

    MwsplsSolution sol = a.scheme == "sum"   ? fit_sum(data, mcfg)
                         : a.scheme == "product" || a.scheme == "prod"
                             ? fit_prod(data, mcfg)
                             : throw InvalidSpec("--scheme must be sum or product");
    json factors = json::array();
    for (const auto& f : sol.factors)
      factors.push_back(factor_json(f.values, f.support(), f.budget));
    out["factors"] = factors;
    out["scheme"] = a.scheme;
    out["w"] = factor_json(sol.w.values, sol.w.support(), sol.w.budget);
    out["objective"] = sol.objective_trace.back();
    out["objective_trace"] = sol.objective_trace;
    out["converged"] = sol.converged;
    out["iterations"] = sol.iterations;
    out["restart_index"] = sol.restart_index;
  } else {
    Standardized X = prepare(raw[0].data, mode);
    Standardized Y = prepare(raw[1].data, mode);

    if (a.method == "pls") {
      PairSolution sol = pls_rank1(X.data, Y.data, 1000, 1e-9, cfg.seed);
      out["u"] = factor_json(sol.u, support_of(sol.u), X.data.cols());
      out["v"] = factor_json(sol.v, support_of(sol.v), Y.data.cols());
      out["objective"] = sol.objective;
      out["objective_trace"] = sol.objective_trace;
      out["converged"] = sol.converged;
      out["iterations"] = sol.iterations;
      out["restart_index"] = 0;
    } else if (a.method == "l0spls" || a.method == "pmd") {
      if (a.ku < 1 || a.kv < 1)
        throw InvalidSpec("this method needs --ku and --kv");
      cfg.k_u = a.ku;
      cfg.k_v = a.kv;
      config["ku"] = a.ku;
      config["kv"] = a.kv;
      PairSolution sol;
      if (a.method == "l0spls") {
        sol = l0_spls(X, Y, a.ku, a.kv, cfg);
      } else {
        double c1 = a.c1, c2 = a.c2;
        if (c1 <= 0.0 || c2 <= 0.0) {
          CalibrationResult cal = calibrate_c(X, Y, a.ku, a.kv, cfg);
          c1 = cal.c1;
          c2 = cal.c2;
          out["calibration"] = json{{"c1", cal.c1},
                                    {"c2", cal.c2},
                                    {"nnz_u", cal.achieved_nnz_u},
                                    {"nnz_v", cal.achieved_nnz_v}};
        }
        config["c1"] = c1;
        config["c2"] = c2;
        sol = pmd_spls(X, Y, c1, c2, cfg);
      }
      out["u"] = factor_json(sol.u, support_of(sol.u), a.ku);
      out["v"] = factor_json(sol.v, support_of(sol.v), a.kv);
      out["objective"] = sol.objective;
      out["objective_trace"] = sol.objective_trace;
      out["converged"] = sol.converged;
      out["iterations"] = sol.iterations;
      out["restart_index"] = sol.restart_index;
    } else if (a.method == "wspls" || a.method == "l2l0") {
      if (a.ku < 1 || a.kv < 1 || a.kw <= 0.0)
        throw InvalidSpec("this method needs --ku, --kv, and --kw");
      cfg.k_u = a.ku;
      cfg.k_v = a.kv;
      cfg.k_w = resolve_weight_budget(a.kw, n);
      config["ku"] = a.ku;
      config["kv"] = a.kv;
      config["kw"] = cfg.k_w;
      WsplsSolution sol = a.method == "wspls" ? fit(X, Y, cfg)
                                              : fit_l2_variant(X, Y, cfg);
      out["u"] = factor_json(sol.u.values, sol.u.support(), sol.u.budget);
      out["v"] = factor_json(sol.v.values, sol.v.support(), sol.v.budget);
      out["w"] = factor_json(sol.w.values, sol.w.support(), sol.w.budget);
      out["objective"] = sol.objective_trace.back();
      out["objective_trace"] = sol.objective_trace;
      out["converged"] = sol.converged;
      out["iterations"] = sol.iterations;
      out["restart_index"] = sol.restart_index;
    } else {
      throw InvalidSpec("unknown method '" + a.method + "'");
    }
  }

  std::vector<fs::path> inputs;
  for (const auto& d : a.data) inputs.emplace_back(d);
  out["manifest"] = manifest_json("fit", argv, config, inputs);
  write_json(a.out, out);
  std::cout << "wrote " << a.out << "\n";
  return 0;
}

struct ExtractArgs {
  std::vector<std::string> data;
  Index ku = 0, kv = 0;
  double kw = 0.0;
  int rounds = 1;
  int restarts = 5, max_iter = 20;
  double tol = 1e-5, L = 1.0;
  std::uint64_t seed = 0;
  std::string out;
};

json module_json(const CoModule& m) {
  json features = json::array();
  for (const auto& f : m.features) features.push_back(to_json(f));
  return json{{"samples", to_json(m.samples)},
              {"features", features},
              {"s_score", m.s_score},
              {"source", m.source}};
}

int cmd_extract(const ExtractArgs& a, const std::vector<std::string>& argv) {
  if (a.data.size() != 2) throw InvalidSpec("extract takes exactly two --data files");
  CsvMatrix X = read_csv(a.data[0]);
  CsvMatrix Y = read_csv(a.data[1]);
  if (X.data.rows() != Y.data.rows())
    throw IncompatibleFiles("data files disagree on the number of rows");

  SolverConfig cfg;
  cfg.k_u = a.ku;
  cfg.k_v = a.kv;
  cfg.k_w = resolve_weight_budget(a.kw, X.data.rows());
  cfg.L_u = cfg.L_v = cfg.L_w = a.L;
  cfg.max_iter = a.max_iter;
  cfg.tol = a.tol;
  cfg.restarts = a.restarts;
  cfg.seed = resolve_seed(a.seed);

  ExtractionOptions opt;
  opt.rounds = a.rounds;
  opt.allow_partial = true;

  ExtractionResult res = extract_sequential(X.data, Y.data, cfg, opt);

  json config{{"data", a.data},   {"ku", a.ku},
              {"kv", a.kv},       {"kw", cfg.k_w},
              {"rounds", a.rounds}, {"restarts", a.restarts},
              {"max_iter", a.max_iter}, {"tol", a.tol},
              {"L", a.L},         {"seed", cfg.seed}};
  json out;
  out["index_base"] = 0;
  json modules = json::array();
  for (const auto& m : res.modules) modules.push_back(module_json(m));
  out["modules"] = modules;
  out["dropped_columns"] =
      json::array({to_json(res.dropped_columns_x), to_json(res.dropped_columns_y)});
  out["insufficient_at_round"] =
      res.insufficient_at_round ? json(*res.insufficient_at_round) : json(nullptr);
  out["manifest"] = manifest_json("extract", argv, config,
                                  {fs::path(a.data[0]), fs::path(a.data[1])});
  write_json(a.out, out);
  std::cout << "wrote " << a.out << " (" << res.modules.size() << " modules)\n";

  if (res.insufficient_at_round) {
    std::cerr << "insufficient samples at round " << *res.insufficient_at_round
              << "; partial results flagged in " << a.out << "\n";
    return 4;
  }
  return 0;
}

struct ScoreArgs {
  std::string solution, modules;
  std::vector<std::string> data;
  std::string truth;
  int n_perm = 0;
  int threads = 1;
  std::uint64_t seed = 0;
  std::string out;
};

json metrics_json(const MetricsReport& r) {
  auto entry = [](const TargetMetrics& t) {
    return json{{"tpr", t.tpr},
                {"tnr", t.tnr},
                {"acc", t.acc},
                {"tp", t.counts.tp},
                {"tn", t.counts.tn},
                {"p", t.counts.pos},
                {"n", t.counts.neg}};
  };
  return json{{"u", entry(r.u)}, {"v", entry(r.v)}, {"w", entry(r.w)},
              {"all", entry(r.all)}};
}

int cmd_score(const ScoreArgs& a, const std::vector<std::string>& argv) {
  if (a.solution.empty() == a.modules.empty())
    throw InvalidSpec("score needs exactly one of --solution or --modules");

  json config{{"n_perm", a.n_perm}, {"threads", a.threads},
              {"seed", resolve_seed(a.seed)}};
  std::vector<fs::path> inputs;
  json report;
  report["index_base"] = 0;
  std::string csv_flat;

  std::vector<Matrix> views;
  for (const auto& d : a.data) {
    views.push_back(read_csv(d).data);
    inputs.emplace_back(d);
    config["data"].push_back(d);
  }

  if (!a.solution.empty()) {
    const json sol = json::parse(read_text(a.solution));
    inputs.emplace_back(a.solution);
    config["solution"] = a.solution;

    if (!a.truth.empty()) {
      const json tj = json::parse(read_text(a.truth));
      inputs.emplace_back(a.truth);
      config["truth"] = a.truth;
      if (!sol.contains("u") || !sol.contains("v"))
        throw IncompatibleFiles("truth scoring needs a pairwise solution (u, v)");
      PlantedTruth truth;
      truth.u = vector_from_json(tj.at("u"));
      truth.v = vector_from_json(tj.at("v"));
      truth.w = vector_from_json(tj.at("w"));
      SupportEstimate est;
      est.u = vector_from_json(sol.at("u").at("values"));
      est.v = vector_from_json(sol.at("v").at("values"));
      if (sol.contains("w"))
        est.w = vector_from_json(sol.at("w").at("values"));
      if (est.u.size() != truth.u.size() || est.v.size() != truth.v.size() ||
          (est.w && est.w->size() != truth.w.size()))
        throw IncompatibleFiles("solution and truth dimensions disagree");
      MetricsReport m = score(est, truth);
      report["metrics"] = metrics_json(m);
      csv_flat += "target,metric,value\n";
      const char* names[4] = {"u", "v", "w", "all"};
      const TargetMetrics* entries[4] = {&m.u, &m.v, &m.w, &m.all};
      for (int i = 0; i < 4; ++i) {
        csv_flat += std::string(names[i]) + ",tpr," + fmt17(entries[i]->tpr) + "\n";
        csv_flat += std::string(names[i]) + ",tnr," + fmt17(entries[i]->tnr) + "\n";
        csv_flat += std::string(names[i]) + ",acc," + fmt17(entries[i]->acc) + "\n";
      }
    }

    if (a.truth.empty() || a.n_perm > 0) {
      if (views.empty())
        throw InvalidSpec("s-score needs the --data matrices");
      // assemble the module: positive weights (all samples when the method
      // has no w), factor supports as feature sets
      CoModule module;
      module.source = sol.value("method", "unknown");
      const Index n = views.front().rows();
      if (sol.contains("w")) {
        Vector w = vector_from_json(sol.at("w").at("values"));
        for (Index i = 0; i < w.size(); ++i)
          if (w[i] > 0.0) module.samples.push_back(i);
      } else {
        for (Index i = 0; i < n; ++i) module.samples.push_back(i);
      }
      if (sol.contains("factors")) {
        for (const auto& f : sol.at("factors")) {
          std::vector<Index> sup;
          for (const auto& i : f.at("support")) sup.push_back(i.get<Index>());
          module.features.push_back(std::move(sup));
        }
      } else {
        for (const char* key : {"u", "v"}) {
          std::vector<Index> sup;
          for (const auto& i : sol.at(key).at("support")) sup.push_back(i.get<Index>());
          module.features.push_back(std::move(sup));
        }
      }
      if (module.features.size() != views.size())
        throw IncompatibleFiles("solution has a different view count than --data");
      SScoreDetail d = s_score_detail(module, views);
      report["s_score"] = d.score;
      report["degenerate_pairs"] = d.degenerate_pairs;
      report["total_pairs"] = d.total_pairs;
      if (!csv_flat.empty()) csv_flat += "\n";
      csv_flat += "module,s_score,p_value\n";
      std::string prow = "0," + fmt17(d.score) + ",";
      if (a.n_perm > 0) {
        module.s_score = d.score;
        const double p = permutation_test(module, views, a.n_perm,
                                          resolve_seed(a.seed), a.threads);
        report["p_value"] = p;
        report["n_perm"] = a.n_perm;
        prow += fmt17(p);
      }
      csv_flat += prow + "\n";
    }
  } else {
    if (views.empty()) throw InvalidSpec("s-score needs the --data matrices");
    const json mj = json::parse(read_text(a.modules));
    inputs.emplace_back(a.modules);
    config["modules"] = a.modules;
    json scored = json::array();
    csv_flat += "module,s_score,p_value\n";
    int idx = 0;
    for (const auto& m : mj.at("modules")) {
      CoModule module;
      for (const auto& i : m.at("samples")) module.samples.push_back(i.get<Index>());
      for (const auto& f : m.at("features")) {
        std::vector<Index> sup;
        for (const auto& i : f) sup.push_back(i.get<Index>());
        module.features.push_back(std::move(sup));
      }
      module.source = m.value("source", "unknown");
      SScoreDetail d = s_score_detail(module, views);
      json entry{{"s_score", d.score},
                 {"degenerate_pairs", d.degenerate_pairs},
                 {"total_pairs", d.total_pairs}};
      std::string prow = std::to_string(idx) + "," + fmt17(d.score) + ",";
      if (a.n_perm > 0) {
        module.s_score = d.score;
        const double p = permutation_test(module, views, a.n_perm,
                                          resolve_seed(a.seed) + idx, a.threads);
        entry["p_value"] = p;
        prow += fmt17(p);
      }
      scored.push_back(entry);
      csv_flat += prow + "\n";
      ++idx;
    }
    report["modules"] = scored;
    if (a.n_perm > 0) report["n_perm"] = a.n_perm;
  }

  report["manifest"] = manifest_json("score", argv, config, inputs);
  write_json(a.out, report);
  fs::path csv_path(a.out);
  csv_path.replace_extension(".csv");
  write_text_atomic(csv_path, csv_flat);
  std::cout << "wrote " << a.out << " and " << csv_path.string() << "\n";
  return 0;
}

struct BenchArgs {
  std::string scenario = "I";
  Index n = 0, p = 0, q = 0;
  double snr = 0.1;
  Index ku = 0, kv = 0;
  double kw = 0.0;
  std::string methods = "pls,pmd,l0spls,l2l0,wspls";
  int runs = 20;
  int restarts = 5, max_iter = 20;
  double tol = 1e-5, L = 1.0;
  int threads = 1;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_bench(const BenchArgs& a, const std::vector<std::string>& argv) {
  BenchmarkSpec spec;
  const Scenario scn = scenario_from_string(a.scenario);
  if (scn == Scenario::Custom) {
    if (a.n < 2 || a.p < 1 || a.q < 1)
      throw InvalidSpec("custom scenario requires --n, --p, --q");
    spec.sim.n = a.n;
    spec.sim.p = a.p;
    spec.sim.q = a.q;
    spec.sim.scenario = Scenario::Custom;
  } else {
    spec.sim = scenario_spec(scn);
  }
  spec.sim.snr1 = spec.sim.snr2 = a.snr;
  spec.sim.seed = resolve_seed(a.seed);
  if (a.ku > 0) spec.k_u = a.ku;
  if (a.kv > 0) spec.k_v = a.kv;
  if (a.kw > 0) spec.k_w = resolve_weight_budget(a.kw, spec.sim.n);
  spec.runs = a.runs;
  spec.restarts = a.restarts;
  spec.max_iter = a.max_iter;
  spec.tol = a.tol;
  spec.L = a.L;
  spec.threads = a.threads;

  std::vector<Method> methods;
  for (const auto& name : split_csv_list(a.methods))
    methods.push_back(method_from_string(name));
  if (methods.empty()) throw InvalidSpec("--methods is empty");

  BenchmarkReport report = run_benchmark(spec, methods);

  const fs::path dir(a.out);
  fs::create_directories(dir);

  // Table-2-shaped summary: one row per method, mean and stddev per metric.
  const char* targets[4] = {"all", "u", "v", "w"};
  std::string summary = "method";
  for (const char* metric : {"acc", "tpr", "tnr"})
    for (const char* t : targets)
      summary += std::string(",") + metric + "_" + t + "_mean," + metric + "_" + t + "_std";
  summary += ",time_mean,time_std\n";
  for (const auto& agg : report.methods) {
    summary += method_name(agg.method);
    for (auto metric : {&TargetMetrics::acc, &TargetMetrics::tpr, &TargetMetrics::tnr}) {
      for (auto target : {&MetricsReport::all, &MetricsReport::u,
                          &MetricsReport::v, &MetricsReport::w}) {
        summary += "," + fmt17(agg.mean.*target.*metric);
        summary += "," + fmt17(agg.stddev.*target.*metric);
      }
    }
    summary += "," + fmt17(agg.mean.runtime_seconds);
    summary += "," + fmt17(agg.stddev.runtime_seconds) + "\n";
  }
  write_text_atomic(dir / "summary.csv", summary);

  std::string runs_csv =
      "method,run,seed,acc_all,acc_u,acc_v,acc_w,tpr_all,tpr_u,tpr_v,tpr_w,"
      "tnr_all,tnr_u,tnr_v,tnr_w,time_seconds\n";
  for (const auto& agg : report.methods) {
    for (std::size_t r = 0; r < agg.per_run.size(); ++r) {
      const auto& m = agg.per_run[r];
      runs_csv += method_name(agg.method) + "," + std::to_string(r) + "," +
                  std::to_string(spec.sim.seed + r);
      for (auto target : {&MetricsReport::all, &MetricsReport::u,
                          &MetricsReport::v, &MetricsReport::w})
        runs_csv += "," + fmt17((m.*target).acc);
      for (auto target : {&MetricsReport::all, &MetricsReport::u,
                          &MetricsReport::v, &MetricsReport::w})
        runs_csv += "," + fmt17((m.*target).tpr);
      for (auto target : {&MetricsReport::all, &MetricsReport::u,
                          &MetricsReport::v, &MetricsReport::w})
        runs_csv += "," + fmt17((m.*target).tnr);
      runs_csv += "," + fmt17(m.runtime_seconds) + "\n";
    }
  }
  write_text_atomic(dir / "runs.csv", runs_csv);

  json config{{"scenario", scenario_name(spec.sim.scenario)},
              {"n", spec.sim.n},
              {"p", spec.sim.p},
              {"q", spec.sim.q},
              {"snr", a.snr},
              {"ku", spec.k_u},
              {"kv", spec.k_v},
              {"kw", spec.k_w},
              {"methods", a.methods},
              {"runs", spec.runs},
              {"restarts", spec.restarts},
              {"max_iter", spec.max_iter},
              {"tol", spec.tol},
              {"L", spec.L},
              {"threads", spec.threads},
              {"seed", spec.sim.seed}};
  json jr;
  jr["index_base"] = 0;
  json jmethods = json::array();
  for (const auto& agg : report.methods) {
    json jm{{"method", method_name(agg.method)},
            {"mean", metrics_json(agg.mean)},
            {"stddev", metrics_json(agg.stddev)},
            {"time_mean", agg.mean.runtime_seconds},
            {"time_std", agg.stddev.runtime_seconds}};
    if (agg.calibration)
      jm["calibration"] = json{{"c1", agg.calibration->c1},
                               {"c2", agg.calibration->c2},
                               {"nnz_u", agg.calibration->achieved_nnz_u},
                               {"nnz_v", agg.calibration->achieved_nnz_v}};
    jmethods.push_back(jm);
  }
  jr["methods"] = jmethods;
  jr["manifest"] = manifest_json("bench", argv, config, {});
  write_json(dir / "report.json", jr);
  std::cout << "wrote " << (dir / "summary.csv").string() << ", "
            << (dir / "runs.csv").string() << ", "
            << (dir / "report.json").string() << "\n";
  return 0;
}

int dispatch(const std::vector<std::string>& args) {
  CLI::App app{"weighted sparse PLS co-module toolkit"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "generate synthetic paired data");
  simulate->add_option("--scenario", sim.scenario, "I, II, III, or custom");
  simulate->add_option("--n", sim.n, "samples (custom scenario)");
  simulate->add_option("--p", sim.p, "features in X (custom scenario)");
  simulate->add_option("--q", sim.q, "features in Y (custom scenario)");
  simulate->add_option("--snr", sim.snr, "signal-to-noise ratio for both views");
  simulate->add_option("--snr1", sim.snr1, "per-view SNR override for X");
  simulate->add_option("--snr2", sim.snr2, "per-view SNR override for Y");
  simulate->add_option("--seed", sim.seed, "RNG seed (COMODULE_SEED overrides)");
  simulate->add_option("--out", sim.out, "output directory")->required();

  FitArgs fit_args;
  auto* fitc = app.add_subcommand("fit", "fit one method to data files");
  fitc->add_option("--method", fit_args.method,
                   "pls, pmd, l0spls, l2l0, wspls, or mwspls");
  fitc->add_option("--data", fit_args.data, "CSV matrices, rows = samples")
      ->required()
      ->expected(-2);
  fitc->add_option("--ku", fit_args.ku, "u sparsity budget");
  fitc->add_option("--kv", fit_args.kv, "v sparsity budget");
  fitc->add_option("--kw", fit_args.kw,
                   "w sparsity budget: count, or fraction of n when below 1");
  fitc->add_option("--k", fit_args.k, "per-view budgets (mwspls)");
  fitc->add_option("--scheme", fit_args.scheme, "mwspls scheme: sum or product");
  fitc->add_option("--c1", fit_args.c1, "explicit pmd l1 bound for u");
  fitc->add_option("--c2", fit_args.c2, "explicit pmd l1 bound for v");
  fitc->add_option("--restarts", fit_args.restarts, "random restarts");
  fitc->add_option("--max-iter", fit_args.max_iter, "sweep budget");
  fitc->add_option("--tol", fit_args.tol, "stopping tolerance");
  fitc->add_option("--L", fit_args.L, "step constant for every block");
  fitc->add_option("--stop-rule", fit_args.stop_rule, "iterate, objective, or both");
  fitc->add_option("--standardize", fit_args.standardize,
                   "sample, population, or none");
  fitc->add_option("--seed", fit_args.seed, "RNG seed (COMODULE_SEED overrides)");
  fitc->add_option("--out", fit_args.out, "solution JSON path")->required();

  ExtractArgs ext;
  auto* extract = app.add_subcommand("extract", "sequential co-module extraction");
  extract->add_option("--data", ext.data, "two CSV matrices")->required()->expected(2);
  extract->add_option("--ku", ext.ku, "u sparsity budget")->required();
  extract->add_option("--kv", ext.kv, "v sparsity budget")->required();
  extract->add_option("--kw", ext.kw, "w budget (count or fraction)")->required();
  extract->add_option("--rounds", ext.rounds, "co-modules to extract");
  extract->add_option("--restarts", ext.restarts, "random restarts");
  extract->add_option("--max-iter", ext.max_iter, "sweep budget");
  extract->add_option("--tol", ext.tol, "stopping tolerance");
  extract->add_option("--L", ext.L, "step constant");
  extract->add_option("--seed", ext.seed, "RNG seed (COMODULE_SEED overrides)");
  extract->add_option("--out", ext.out, "modules JSON path")->required();

  ScoreArgs sc;
  auto* scorec = app.add_subcommand("score", "score a solution or modules file");
  scorec->add_option("--solution", sc.solution, "solution JSON from fit");
  scorec->add_option("--modules", sc.modules, "modules JSON from extract");
  scorec->add_option("--data", sc.data, "CSV matrices for S-scores");
  scorec->add_option("--truth", sc.truth, "truth JSON from simulate");
  scorec->add_option("--n-perm", sc.n_perm, "permutation draws (0 = skip)");
  scorec->add_option("--threads", sc.threads, "worker threads");
  scorec->add_option("--seed", sc.seed, "RNG seed (COMODULE_SEED overrides)");
  scorec->add_option("--out", sc.out, "report JSON path")->required();

  BenchArgs bench;
  auto* benchc = app.add_subcommand("bench", "scenario benchmark over repeated runs");
  benchc->add_option("--scenario", bench.scenario, "I, II, III, or custom");
  benchc->add_option("--n", bench.n, "samples (custom)");
  benchc->add_option("--p", bench.p, "features in X (custom)");
  benchc->add_option("--q", bench.q, "features in Y (custom)");
  benchc->add_option("--snr", bench.snr, "signal-to-noise ratio");
  benchc->add_option("--ku", bench.ku, "u budget (defaults to scenario preset)");
  benchc->add_option("--kv", bench.kv, "v budget (defaults to scenario preset)");
  benchc->add_option("--kw", bench.kw, "w budget (defaults to scenario preset)");
  benchc->add_option("--methods", bench.methods, "comma-separated method list");
  benchc->add_option("--runs", bench.runs, "simulation runs");
  benchc->add_option("--restarts", bench.restarts, "random restarts per fit");
  benchc->add_option("--max-iter", bench.max_iter, "sweep budget");
  benchc->add_option("--tol", bench.tol, "stopping tolerance");
  benchc->add_option("--L", bench.L, "step constant");
  benchc->add_option("--threads", bench.threads, "worker threads across runs");
  benchc->add_option("--seed", bench.seed, "master seed (COMODULE_SEED overrides)");
  benchc->add_option("--out", bench.out, "output directory")->required();

  std::vector<std::string> argv_copy = args;
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (simulate->parsed()) return cmd_simulate(sim, argv_copy);
  if (fitc->parsed()) return cmd_fit(fit_args, argv_copy);
  if (extract->parsed()) return cmd_extract(ext, argv_copy);
  if (scorec->parsed()) return cmd_score(sc, argv_copy);
  if (benchc->parsed()) return cmd_bench(bench, argv_copy);
  return 2;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  try {
    return dispatch(args);
  } catch (const InvalidSpec& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const BadBudget& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const IncompatibleFiles& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const NonFinite& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const ConstantColumn& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const DimensionMismatch& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const LengthMismatch& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    // remaining library errors are solver failures
    std::cerr << "solver error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}

}  // namespace comodule
