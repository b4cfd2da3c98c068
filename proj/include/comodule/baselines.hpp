#pragma once

#include <string>
#include <vector>

#include "comodule/core.hpp"
#include "comodule/solver.hpp"
#include "comodule/types.hpp"

namespace comodule {

/// Result of a two-view factor-pair method (no sample weights).
struct PairSolution {
  Vector u, v;
  double objective = 0.0;              // u'X'Yv at the returned pair, >= 0 for pls
  std::vector<double> objective_trace;  // maximized value per sweep
  std::string method;
  bool converged = false;
  int iterations = 0;
  int restart_index = 0;
};

/// Leading singular pair of X'Y by alternating power iteration; never forms
/// X'Y explicitly. Objective is the top singular value (sign convention:
/// u'X'Yv >= 0). Throws ZeroMatrix when X'Y = 0.
PairSolution pls_rank1(const Matrix& X, const Matrix& Y, int max_iter = 1000,
                       double tol = 1e-9, std::uint64_t seed = 0);

/// l0-constrained sparse PLS: alternate exact block maximizers
/// u <- top_k_unit(X'Yv), v <- top_k_unit(Y'Xu). Best of config.restarts
/// seeded starts; stops on relative objective change < config.tol.
PairSolution l0_spls(const Standardized& X, const Standardized& Y, Index k_u,
                     Index k_v, const SolverConfig& config);

/// l1-constrained sparse PLS in the penalized-matrix-decomposition style:
/// alternate u <- l1_unit_project(X'Yv, c1), v <- l1_unit_project(Y'Xu, c2).
PairSolution pmd_spls(const Standardized& X, const Standardized& Y, double c1,
                      double c2, const SolverConfig& config);

struct CalibrationResult {
  double c1 = 0.0, c2 = 0.0;
  Index achieved_nnz_u = 0, achieved_nnz_v = 0;
};

/// Searches (c1, c2) so the fitted pmd_spls nonzero counts land within +/-5%
/// of the targets (coordinate-wise bisection with alternating sweeps).
/// Throws CannotMatch with the nearest achievable counts when the
/// sparsity-versus-c map is too coarse near a target.
CalibrationResult calibrate_c(const Standardized& X, const Standardized& Y,
                              Index target_nnz_u, Index target_nnz_v,
                              const SolverConfig& config);

}  // namespace comodule
