#pragma once

#include <vector>

#include "comodule/errors.hpp"
#include "comodule/types.hpp"

namespace comodule {

/// A projected vector plus the sorted index set of its nonzero entries.
struct ProjectionResult {
  Vector vector;
  std::vector<Index> support;
};

/// Indices of the k entries of z with largest absolute value.
/// Ties break toward the lower index so runs are reproducible.
/// The returned list is sorted ascending.
std::vector<Index> top_k_indices(const Vector& z, Index k);

/// Projection onto the sparse unit sphere {x : ||x||_0 <= k, ||x|| = 1}:
/// keep the k largest-magnitude entries of z, normalize. Among all unit
/// vectors with <= k nonzeros this minimizes ||x - z||^2.
/// Throws ZeroInput when z = 0 and BadBudget when k is out of range.
ProjectionResult top_k_unit(const Vector& z, Index k);

/// Entrywise projection onto the box [0, 1]^n.
Vector clamp_box(const Vector& w);

/// Projection onto {w : w in [0,1]^n, ||w||_0 <= k_w}: keep the k_w
/// coordinates with the largest shifted values (which ranks exactly by the
/// squared-error gain of keeping them, even across box saturation), clamped
/// to [0, 1]. No normalization — the weight block carries no norm
/// constraint, unlike the factor blocks.
ProjectionResult project_weight(const Vector& w_bar, Index k_w);

/// Soft-threshold a, normalize to unit l2 norm, with the threshold chosen by
/// bisection so the result's l1 norm is at most c (l1 penalty route used by
/// the PMD baseline). Requires c >= 1, else the feasible set is empty.
/// When the top magnitudes tie and no threshold reaches c, falls back to the
/// lowest-index single coordinate.
Vector l1_unit_project(const Vector& a, double c);

}  // namespace comodule
