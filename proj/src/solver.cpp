#include "comodule/solver.hpp"

#include <cmath>
#include <optional>
#include <utility>

#include "comodule/projections.hpp"
#include "comodule/rng.hpp"

namespace comodule {

namespace {

std::vector<Index> nonzero_indices(const Vector& v) {
  std::vector<Index> out;
  for (Index i = 0; i < v.size(); ++i)
    if (v[i] != 0.0) out.push_back(i);
  return out;
}

void check_pair(const Vector& u, const Vector& v, const Vector& w,
                const Matrix& X, const Matrix& Y) {
  if (u.size() != X.cols() || v.size() != Y.cols() || w.size() != X.rows() ||
      X.rows() != Y.rows())
    throw DimensionMismatch("wspls: nonconforming dimensions");
}

}  // namespace

std::vector<Index> FactorVector::support() const { return nonzero_indices(values); }
std::vector<Index> WeightVector::support() const { return nonzero_indices(values); }

Vector grad_u(const Vector& u, const Vector& v, const Vector& w,
              const Matrix& X, const Matrix& Y) {
  check_pair(u, v, w, X, Y);
  Vector t = w.cwiseProduct(Y * v);
  return -(X.transpose() * t);
}

Vector grad_v(const Vector& u, const Vector& v, const Vector& w,
              const Matrix& X, const Matrix& Y) {
  check_pair(u, v, w, X, Y);
  Vector t = w.cwiseProduct(X * u);
  return -(Y.transpose() * t);
}

Vector grad_w(const Vector& u, const Vector& v, const Vector& w,
              const Matrix& X, const Matrix& Y) {
  check_pair(u, v, w, X, Y);
  Vector a = X * u;
  Vector b = Y * v;
  return -a.cwiseProduct(b);
}

namespace {

Vector factor_step(const Vector& current, const Vector& grad, Index k, double L,
                   const char* block) {
  Vector shifted = current - grad / L;
  try {
    return top_k_unit(shifted, k).vector;
  } catch (const ZeroInput&) {
    throw DegenerateStep(std::string("zero proximal point in ") + block +
                         " block; reinitialize this restart");
  }
}

}  // namespace

Vector step_u(const Vector& u, const Vector& v, const Vector& w,
              const Matrix& X, const Matrix& Y, Index k_u, double L_u) {
  return factor_step(u, grad_u(u, v, w, X, Y), k_u, L_u, "u");
}

Vector step_v(const Vector& u, const Vector& v, const Vector& w,
              const Matrix& X, const Matrix& Y, Index k_v, double L_v) {
  return factor_step(v, grad_v(u, v, w, X, Y), k_v, L_v, "v");
}

Vector step_w(const Vector& u, const Vector& v, const Vector& w,
              const Matrix& X, const Matrix& Y, Index k_w, double L_w) {
  Vector shifted = w - grad_w(u, v, w, X, Y) / L_w;
  return project_weight(shifted, k_w).vector;
}

Vector step_w_l2(const Vector& u, const Vector& v, const Vector& w,
                 const Matrix& X, const Matrix& Y, Index k_w, double L_w) {
  return factor_step(w, grad_w(u, v, w, X, Y), k_w, L_w, "w");
}

namespace {

enum class WeightMode { Box, Unit, Pinned };

bool stop_fired(StopRule rule, double iterate_change, double rel_obj_change,
                double tol) {
  const bool it = iterate_change < tol;
  const bool ob = rel_obj_change < tol;
  switch (rule) {
    case StopRule::IterateChange: return it;
    case StopRule::ObjectiveChange: return ob;
    case StopRule::Both: return it || ob;
  }
  return false;
}

struct RestartResult {
  Vector u, v, w;
  std::vector<double> trace;
  bool converged = false;
  int iterations = 0;
};

RestartResult run_restart(const Matrix& X, const Matrix& Y,
                          const SolverConfig& cfg, WeightMode mode,
                          std::mt19937_64& rng, const IterateObserver& observer) {
  const Index n = X.rows(), p = X.cols(), q = Y.cols();

  RestartResult r;
  r.u = top_k_unit(normal_vector(rng, p), cfg.k_u).vector;
  r.v = top_k_unit(normal_vector(rng, q), cfg.k_v).vector;
  r.w = Vector::Ones(n);

  Vector prev_u, prev_v, prev_w;
  for (int t = 1; t <= cfg.max_iter; ++t) {
    prev_u = r.u;
    prev_v = r.v;
    prev_w = r.w;

    if (mode == WeightMode::Pinned) {
      // Exact block maximizers; with w fixed these are the plain l0
      // alternating updates.
      r.u = factor_step(Vector::Zero(p), grad_u(r.u, r.v, r.w, X, Y), cfg.k_u,
                        1.0, "u");
      r.v = factor_step(Vector::Zero(q), grad_v(r.u, r.v, r.w, X, Y), cfg.k_v,
                        1.0, "v");
    } else {
      r.u = step_u(r.u, r.v, r.w, X, Y, cfg.k_u, cfg.L_u);
      r.v = step_v(r.u, r.v, r.w, X, Y, cfg.k_v, cfg.L_v);
      r.w = mode == WeightMode::Box
                ? step_w(r.u, r.v, r.w, X, Y, cfg.k_w, cfg.L_w)
                : step_w_l2(r.u, r.v, r.w, X, Y, cfg.k_w, cfg.L_w);
    }

    const double f = objective(r.u, r.v, r.w, X, Y);
    r.trace.push_back(f);
    r.iterations = t;
    if (observer) observer(IterateSnapshot{t, r.u, r.v, r.w, f});

    if (t >= 2) {
      const double change = (r.u - prev_u).norm() + (r.v - prev_v).norm() +
                            (r.w - prev_w).norm();
      const double prev_f = r.trace[static_cast<std::size_t>(t) - 2];
      const double rel =
          std::abs(f - prev_f) / std::max(std::abs(prev_f), 1e-300);
      if (stop_fired(cfg.stop_rule, change, rel, cfg.tol)) {
        r.converged = true;
        break;
      }
    }
  }
  return r;
}

WsplsSolution fit_impl(const Standardized& Xs, const Standardized& Ys,
                       const SolverConfig& cfg, WeightMode mode,
                       const IterateObserver& observer) {
  const Matrix& X = Xs.data;
  const Matrix& Y = Ys.data;
  if (cfg.pin_w && mode == WeightMode::Box) mode = WeightMode::Pinned;
  if (X.rows() != Y.rows())
    throw DimensionMismatch("fit: X and Y must share the sample dimension");
  if (cfg.k_u < 1 || cfg.k_u > X.cols() || cfg.k_v < 1 || cfg.k_v > Y.cols())
    throw BadBudget("fit: factor budget out of range");
  if (mode != WeightMode::Pinned && (cfg.k_w < 1 || cfg.k_w > X.rows()))
    throw BadBudget("fit: weight budget out of range");
  if (cfg.restarts < 1) throw BadBudget("fit: restarts must be >= 1");
  if (cfg.L_u <= 0 || cfg.L_v <= 0 || cfg.L_w <= 0 || cfg.tol <= 0)
    throw BadBudget("fit: step constants and tolerance must be positive");

  std::optional<RestartResult> best;
  int best_restart = 0;
  int failures = 0;
  for (int restart = 0; restart < cfg.restarts; ++restart) {
    auto rng = make_rng(cfg.seed, static_cast<std::uint64_t>(restart));
    try {
      RestartResult r = run_restart(X, Y, cfg, mode, rng, observer);
      if (!best || r.trace.back() < best->trace.back()) {
        best = std::move(r);
        best_restart = restart;
      }
    } catch (const DegenerateStep&) {
      ++failures;
    }
  }
  if (!best)
    throw DegenerateStep("all " + std::to_string(failures) +
                         " restarts hit a degenerate step");

  WsplsSolution sol;
  sol.u = FactorVector{std::move(best->u), cfg.k_u};
  sol.v = FactorVector{std::move(best->v), cfg.k_v};
  sol.w = WeightVector{std::move(best->w),
                       mode == WeightMode::Pinned ? X.rows() : cfg.k_w};
  sol.objective_trace = std::move(best->trace);
  sol.converged = best->converged;
  sol.iterations = best->iterations;
  sol.restart_index = best_restart;
  return sol;
}

}  // namespace

WsplsSolution fit(const Standardized& X, const Standardized& Y,
                  const SolverConfig& config, const IterateObserver& observer) {
  return fit_impl(X, Y, config, WeightMode::Box, observer);
}

WsplsSolution fit_l2_variant(const Standardized& X, const Standardized& Y,
                             const SolverConfig& config,
                             const IterateObserver& observer) {
  return fit_impl(X, Y, config, WeightMode::Unit, observer);
}

}  // namespace comodule
