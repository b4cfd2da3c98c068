#pragma once

#include <cstdint>
#include <vector>

#include "comodule/core.hpp"
#include "comodule/solver.hpp"
#include "comodule/types.hpp"

namespace comodule {

/// m >= 2 views over a common sample set.
struct MultiViewData {
  std::vector<Standardized> views;

  Index samples() const { return views.empty() ? 0 : views.front().rows(); }
  std::size_t view_count() const { return views.size(); }
  void validate() const;
};

enum class MultiViewScheme {
  Sum,      // maximize the sum of weighted pairwise covariances
  Product,  // maximize the weighted elementwise product of all view scores
};

struct MultiViewConfig {
  std::vector<Index> budgets;  // one factor budget per view
  Index k_w = 0;
  double L_u = 1.0, L_w = 1.0;
  int max_iter = 20;
  double tol = 1e-5;  // relative objective change; the only stop rule here
  int restarts = 5;
  std::uint64_t seed = 0;
};

struct MwsplsSolution {
  std::vector<FactorVector> factors;  // one per view, input order
  WeightVector w;
  std::vector<double> objective_trace;
  bool converged = false;
  int iterations = 0;
  int restart_index = 0;
  MultiViewScheme scheme = MultiViewScheme::Sum;
};

// Objectives. Sum: -sum_{i<j} w'[(X_i u_i) .* (X_j u_j)];
// product: -w'[prod_i (X_i u_i)]. Both reduce to the pairwise weighted
// objective at m = 2.
double objective_sum(const std::vector<Vector>& us, const Vector& w,
                     const MultiViewData& data);
double objective_prod(const std::vector<Vector>& us, const Vector& w,
                      const MultiViewData& data);

// Analytic gradients, exposed for the finite-difference suite.
Vector grad_sum_u(std::size_t i, const std::vector<Vector>& us, const Vector& w,
                  const MultiViewData& data);
Vector grad_sum_w(const std::vector<Vector>& us, const MultiViewData& data);
Vector grad_prod_u(std::size_t i, const std::vector<Vector>& us, const Vector& w,
                   const MultiViewData& data);
Vector grad_prod_w(const std::vector<Vector>& us, const MultiViewData& data);

struct MultiViewSnapshot {
  int t;
  const std::vector<Vector>& factors;
  const Vector& w;
  double objective;
};
using MultiViewObserver = std::function<void(const MultiViewSnapshot&)>;

/// Cyclic block solver, sum scheme: update u_1..u_m in input order, then w.
/// Views are cycled Gauss-Seidel style, so results depend on view order.
MwsplsSolution fit_sum(const MultiViewData& data, const MultiViewConfig& config,
                       const MultiViewObserver& observer = {});

/// Cyclic block solver, product scheme.
MwsplsSolution fit_prod(const MultiViewData& data, const MultiViewConfig& config,
                        const MultiViewObserver& observer = {});

}  // namespace comodule
