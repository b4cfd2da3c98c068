#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "comodule/multiview.hpp"
#include "comodule/solver.hpp"
#include "comodule/types.hpp"

namespace comodule {

/// A sample subset plus one feature subset per view, with its average
/// cross-view correlation score.
struct CoModule {
  std::vector<Index> samples;                 // sorted, original coordinates
  std::vector<std::vector<Index>> features;   // one sorted set per view
  double s_score = 0.0;
  std::string source;  // which solver produced it
};

/// Sample set = positive entries of w; feature sets = factor supports.
/// Throws EmptySelection when any support is empty.
CoModule assemble(const WsplsSolution& solution);
CoModule assemble(const MwsplsSolution& solution);

struct SScoreDetail {
  double score = 0.0;
  long degenerate_pairs = 0;  // pairs with a feature constant on T (counted as 0)
  long total_pairs = 0;
};

/// Average absolute Pearson correlation over all cross-view feature pairs of
/// the module, computed on the module's sample rows. Pairs with a constant
/// feature contribute 0 but stay in the denominator, so the statistic remains
/// defined on degenerate permutation draws. Requires |T| >= 3.
SScoreDetail s_score_detail(const CoModule& module,
                            const std::vector<Matrix>& views);
double s_score(const CoModule& module, const std::vector<Matrix>& views);

/// Permutation p-value for the module's S-score: n_perm cardinality-matched
/// uniform random modules, p = (1 + #{random S >= observed S}) / (n_perm + 1).
/// Draws use a splittable seed stream, so the result is independent of
/// thread count.
double permutation_test(const CoModule& module, const std::vector<Matrix>& views,
                        int n_perm, std::uint64_t seed, int threads = 1);

struct ExtractionOptions {
  int rounds = 1;
  // Stop with partial results instead of throwing when samples run out
  // mid-extraction (round 0 exhaustion always throws).
  bool allow_partial = false;
  ScaleConvention convention = ScaleConvention::SampleVariance;
};

struct ExtractionResult {
  std::vector<CoModule> modules;
  // columns dropped because they became constant after sample deletion,
  // original coordinates, per view
  std::vector<Index> dropped_columns_x, dropped_columns_y;
  std::optional<int> insufficient_at_round;
};

/// Sequential co-module extraction by sample deflation: fit, assemble, delete
/// the module's sample rows from both matrices, re-standardize the remaining
/// rows, repeat. Returned index sets are in original coordinates and the
/// sample sets are pairwise disjoint. Inputs are raw (unstandardized).
ExtractionResult extract_sequential(const Matrix& X, const Matrix& Y,
                                    const SolverConfig& config,
                                    const ExtractionOptions& options);

}  // namespace comodule
