#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "comodule/core.hpp"
#include "comodule/errors.hpp"
#include "comodule/types.hpp"

namespace comodule {

enum class StopRule {
  IterateChange,    // ||u_t - u_{t-1}|| + ||v_t - v_{t-1}|| + ||w_t - w_{t-1}|| < tol
  ObjectiveChange,  // |f_t - f_{t-1}| / |f_{t-1}| < tol
  Both,             // whichever fires first
};

struct SolverConfig {
  Index k_u = 0, k_v = 0, k_w = 0;  // sparsity budgets
  double L_u = 1.0, L_v = 1.0, L_w = 1.0;  // step constants; any positive value is valid
  int max_iter = 20;
  double tol = 1e-5;
  int restarts = 5;
  std::uint64_t seed = 0;
  StopRule stop_rule = StopRule::Both;
  // Pins w to all-ones and skips the weight block. The factor blocks then use
  // the exact block maximizers (the small-L limit of the proximal steps),
  // which makes the run coincide with the plain l0 alternating scheme.
  bool pin_w = false;
};

/// Unit-norm factor with an l0 budget (the u / v roles).
struct FactorVector {
  Vector values;
  Index budget = 0;
  std::vector<Index> support() const;
};

/// Per-sample weights; in the box model every entry lies in [0, 1].
struct WeightVector {
  Vector values;
  Index budget = 0;
  std::vector<Index> support() const;
};

struct WsplsSolution {
  FactorVector u, v;
  WeightVector w;
  std::vector<double> objective_trace;  // f after each full sweep; non-increasing
  bool converged = false;
  int iterations = 0;
  int restart_index = 0;
};

// Analytic gradients of `objective` (each block enters linearly, so these are
// exact and globally Lipschitz with any positive constant).
Vector grad_u(const Vector& u, const Vector& v, const Vector& w,
              const Matrix& X, const Matrix& Y);
Vector grad_v(const Vector& u, const Vector& v, const Vector& w,
              const Matrix& X, const Matrix& Y);
Vector grad_w(const Vector& u, const Vector& v, const Vector& w,
              const Matrix& X, const Matrix& Y);

// One proximal block update each. step_u / step_v throw DegenerateStep when
// the shifted point is exactly zero (the projection is undefined there; the
// solver treats it as a failed restart).
Vector step_u(const Vector& u, const Vector& v, const Vector& w,
              const Matrix& X, const Matrix& Y, Index k_u, double L_u);
Vector step_v(const Vector& u, const Vector& v, const Vector& w,
              const Matrix& X, const Matrix& Y, Index k_v, double L_v);
Vector step_w(const Vector& u, const Vector& v, const Vector& w,
              const Matrix& X, const Matrix& Y, Index k_w, double L_w);
// Weight update of the l2/l0 variant: unit sphere instead of the box.
Vector step_w_l2(const Vector& u, const Vector& v, const Vector& w,
                 const Matrix& X, const Matrix& Y, Index k_w, double L_w);

/// Called after every full sweep; lets tests inspect per-iteration feasibility.
struct IterateSnapshot {
  int t;  // 1-based sweep counter
  const Vector& u;
  const Vector& v;
  const Vector& w;
  double objective;
};
using IterateObserver = std::function<void(const IterateSnapshot&)>;

/// Block proximal gradient solver for the box-constrained weighted sparse PLS
/// model. Best of `restarts` runs, each from a fresh normal draw of (u, v)
/// projected to feasibility, with w started at all-ones.
WsplsSolution fit(const Standardized& X, const Standardized& Y,
                  const SolverConfig& config, const IterateObserver& observer = {});

/// Same solver with the weight block constrained to the sparse unit sphere
/// (||w|| = 1, ||w||_0 <= k_w, no box / nonnegativity).
WsplsSolution fit_l2_variant(const Standardized& X, const Standardized& Y,
                             const SolverConfig& config,
                             const IterateObserver& observer = {});

}  // namespace comodule
