#pragma once

#include "comodule/errors.hpp"
#include "comodule/types.hpp"

namespace comodule {

enum class ScaleConvention {
  SampleVariance,      // divisor n-1 (default)
  PopulationVariance,  // divisor n
};

/// How a Standardized matrix came to claim that status.
enum class Provenance {
  Computed,  // standardize_columns ran; mean-0 / variance-1 invariants hold
  Given,     // caller supplied the matrix as-is (e.g. synthetic benchmark data)
};

/// An n-by-p data matrix together with the standardization applied to it.
/// With Provenance::Computed every column of `data` has mean 0 (|.| < 1e-10)
/// and variance 1 under `convention`; `column_means` / `column_scales` record
/// how to map back to the raw scale.
struct Standardized {
  Matrix data;
  Vector column_means;
  Vector column_scales;
  ScaleConvention convention = ScaleConvention::SampleVariance;
  Provenance provenance = Provenance::Computed;

  Index rows() const { return data.rows(); }
  Index cols() const { return data.cols(); }

  /// Wraps a matrix without touching it (identity means/scales).
  static Standardized given(Matrix m);
};

/// Validates a raw input matrix: n >= 2, p >= 1, all entries finite.
void validate_raw(const Matrix& m);

/// Returns the indices of columns with zero variance (exact ties of all
/// entries), for callers that want to drop them before standardizing.
std::vector<Index> find_constant_columns(const Matrix& m);

/// Centers and scales every column to mean 0, variance 1.
/// Throws NonFinite on NaN/Inf input and ConstantColumn on a zero-variance
/// column (standardization is undefined there and downstream gradients
/// degenerate, so constant columns are rejected rather than zeroed).
Standardized standardize_columns(const Matrix& m,
                                 ScaleConvention convention = ScaleConvention::SampleVariance);

/// f(u, v, w) = -w' [(Xu) .* (Yv)], the minimized objective shared by all
/// weighted solvers. Equal to -u'X'diag(w)Yv.
double objective(const Vector& u, const Vector& v, const Vector& w,
                 const Matrix& X, const Matrix& Y);

/// Pearson correlation coefficient of two equal-length sequences.
/// Throws LengthMismatch / ZeroVariance.
double pearson(const Vector& x, const Vector& y);

}  // namespace comodule
