#include "comodule/baselines.hpp"

#include <cmath>
#include <optional>
#include <utility>

#include "comodule/projections.hpp"
#include "comodule/rng.hpp"

namespace comodule {

PairSolution pls_rank1(const Matrix& X, const Matrix& Y, int max_iter,
                       double tol, std::uint64_t seed) {
  if (X.rows() != Y.rows())
    throw DimensionMismatch("pls_rank1: X and Y must share the sample dimension");

  auto rng = make_rng(seed, 0);
  PairSolution sol;
  sol.method = "pls";

  Vector v = normal_vector(rng, Y.cols());
  v /= v.norm();
  Vector u;
  double sigma = 0.0;
  for (int t = 1; t <= max_iter; ++t) {
    Vector mu = X.transpose() * (Y * v);  // (X'Y) v without forming X'Y
    const double nu = mu.norm();
    if (nu == 0.0) throw ZeroMatrix("pls_rank1: X'Y annihilates the iterate");
    u = mu / nu;
    Vector mv = Y.transpose() * (X * u);
    const double s = mv.norm();
    if (s == 0.0) throw ZeroMatrix("pls_rank1: X'Y annihilates the iterate");
    v = mv / s;
    sol.iterations = t;
    if (std::abs(s - sigma) / std::max(s, 1e-300) < tol) {
      sol.converged = true;
      sigma = s;
      break;
    }
    sigma = s;
  }
  // u = (X'Y)v / ||.|| makes u'X'Yv = ||(X'Y)v|| >= 0 automatically; keep the
  // guard in case of a pathological last sweep.
  sol.objective = u.dot(X.transpose() * (Y * v));
  if (sol.objective < 0.0) {
    u = -u;
    sol.objective = -sol.objective;
  }
  sol.u = std::move(u);
  sol.v = std::move(v);
  sol.objective_trace.push_back(sol.objective);
  return sol;
}

namespace {

// Shared alternating loop for the two sparse baselines. The u/v updates are
// the exact block maximizers of u'X'Yv over the method's feasible set.
template <typename UStep, typename VStep>
PairSolution alternate_pair(const Matrix& X, const Matrix& Y,
                            const SolverConfig& cfg, const char* method,
                            UStep u_step, VStep v_step) {
  if (X.rows() != Y.rows())
    throw DimensionMismatch("baseline: X and Y must share the sample dimension");
  if (cfg.restarts < 1) throw BadBudget("baseline: restarts must be >= 1");

  const Vector ones = Vector::Ones(X.rows());
  std::optional<PairSolution> best;
  int failures = 0;
  for (int restart = 0; restart < cfg.restarts; ++restart) {
    auto rng = make_rng(cfg.seed, static_cast<std::uint64_t>(restart));
    try {
      // Same draw order as the weighted solver so seed-parity tests line up.
      Vector u = top_k_unit(normal_vector(rng, X.cols()),
                            cfg.k_u > 0 ? cfg.k_u : X.cols())
                     .vector;
      Vector v = top_k_unit(normal_vector(rng, Y.cols()),
                            cfg.k_v > 0 ? cfg.k_v : Y.cols())
                     .vector;
      PairSolution run;
      run.method = method;
      for (int t = 1; t <= cfg.max_iter; ++t) {
        u = u_step(X.transpose() * (Y * v));
        v = v_step(Y.transpose() * (X * u));
        const double f = -objective(u, v, ones, X, Y);
        run.objective_trace.push_back(f);
        run.iterations = t;
        if (t >= 2) {
          const double prev = run.objective_trace[static_cast<std::size_t>(t) - 2];
          if (std::abs(f - prev) / std::max(std::abs(prev), 1e-300) < cfg.tol) {
            run.converged = true;
            break;
          }
        }
      }
      run.u = std::move(u);
      run.v = std::move(v);
      run.objective = run.objective_trace.back();
      run.restart_index = restart;
      if (!best || run.objective > best->objective) best = std::move(run);
    } catch (const ZeroInput&) {
      ++failures;
    } catch (const DegenerateStep&) {
      ++failures;
    }
  }
  if (!best)
    throw DegenerateStep("baseline: all " + std::to_string(failures) +
                         " restarts degenerated");
  return std::move(*best);
}

}  // namespace

PairSolution l0_spls(const Standardized& X, const Standardized& Y, Index k_u,
                     Index k_v, const SolverConfig& config) {
  if (k_u < 1 || k_u > X.cols() || k_v < 1 || k_v > Y.cols())
    throw BadBudget("l0_spls: budget out of range");
  SolverConfig cfg = config;
  cfg.k_u = k_u;
  cfg.k_v = k_v;
  return alternate_pair(
      X.data, Y.data, cfg, "l0spls",
      [k_u](const Vector& z) { return top_k_unit(z, k_u).vector; },
      [k_v](const Vector& z) { return top_k_unit(z, k_v).vector; });
}

PairSolution pmd_spls(const Standardized& X, const Standardized& Y, double c1,
                      double c2, const SolverConfig& config) {
  if (c1 < 1.0 || c2 < 1.0)
    throw Infeasible("pmd_spls: l1 bounds below 1 admit no unit vector");
  return alternate_pair(
      X.data, Y.data, config, "pmd",
      [c1](const Vector& z) { return l1_unit_project(z, c1); },
      [c2](const Vector& z) { return l1_unit_project(z, c2); });
}

namespace {

Index count_nonzero(const Vector& v) {
  Index c = 0;
  for (Index i = 0; i < v.size(); ++i)
    if (v[i] != 0.0) ++c;
  return c;
}

}  // namespace

CalibrationResult calibrate_c(const Standardized& X, const Standardized& Y,
                              Index target_nnz_u, Index target_nnz_v,
                              const SolverConfig& config) {
  const Index p = X.cols(), q = Y.cols();
  if (target_nnz_u < 1 || target_nnz_u > p || target_nnz_v < 1 ||
      target_nnz_v > q)
    throw BadBudget("calibrate_c: target out of range");

  const double hi_u = std::sqrt(double(p)), hi_v = std::sqrt(double(q));
  CalibrationResult res;
  res.c1 = target_nnz_u == p ? hi_u : 0.5 * (1.0 + hi_u);
  res.c2 = target_nnz_v == q ? hi_v : 0.5 * (1.0 + hi_v);

  auto within = [](Index got, Index want) {
    return std::abs(double(got - want)) <= 0.05 * double(want);
  };
  auto fit_counts = [&](double c1, double c2) {
    PairSolution s = pmd_spls(X, Y, c1, c2, config);
    return std::pair<Index, Index>{count_nonzero(s.u), count_nonzero(s.v)};
  };

  auto [nu, nv] = fit_counts(res.c1, res.c2);
  for (int sweep = 0; sweep < 3 && !(within(nu, target_nnz_u) && within(nv, target_nnz_v));
       ++sweep) {
    double lo = 1.0, hi = hi_u;
    for (int it = 0; it < 24 && !within(nu, target_nnz_u); ++it) {
      res.c1 = 0.5 * (lo + hi);
      std::tie(nu, nv) = fit_counts(res.c1, res.c2);
      if (nu > target_nnz_u)
        hi = res.c1;
      else
        lo = res.c1;
    }
    lo = 1.0;
    hi = hi_v;
    for (int it = 0; it < 24 && !within(nv, target_nnz_v); ++it) {
      res.c2 = 0.5 * (lo + hi);
      std::tie(nu, nv) = fit_counts(res.c1, res.c2);
      if (nv > target_nnz_v)
        hi = res.c2;
      else
        lo = res.c2;
    }
  }
  res.achieved_nnz_u = nu;
  res.achieved_nnz_v = nv;
  if (!within(nu, target_nnz_u) || !within(nv, target_nnz_v))
    throw CannotMatch(nu, nv);
  return res;
}

}  // namespace comodule
