#include "comodule/comodules.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>

#include "comodule/core.hpp"
#include "comodule/rng.hpp"
#include "comodule/threading.hpp"

namespace comodule {

namespace {

std::vector<Index> positive_indices(const Vector& w) {
  std::vector<Index> out;
  for (Index i = 0; i < w.size(); ++i)
    if (w[i] > 0.0) out.push_back(i);
  return out;
}

void require_nonempty(const std::vector<Index>& set, const char* what) {
  if (set.empty())
    throw EmptySelection(std::string("empty ") + what + " selection");
}

}  // namespace

CoModule assemble(const WsplsSolution& solution) {
  CoModule m;
  m.samples = positive_indices(solution.w.values);
  require_nonempty(m.samples, "sample");
  m.features.push_back(solution.u.support());
  m.features.push_back(solution.v.support());
  require_nonempty(m.features[0], "u feature");
  require_nonempty(m.features[1], "v feature");
  m.source = "wspls";
  return m;
}

CoModule assemble(const MwsplsSolution& solution) {
  CoModule m;
  m.samples = positive_indices(solution.w.values);
  require_nonempty(m.samples, "sample");
  for (const auto& f : solution.factors) {
    m.features.push_back(f.support());
    require_nonempty(m.features.back(), "feature");
  }
  m.source = solution.scheme == MultiViewScheme::Sum ? "mwspls-sum" : "mwspls-prod";
  return m;
}

SScoreDetail s_score_detail(const CoModule& module,
                            const std::vector<Matrix>& views) {
  if (views.size() != module.features.size())
    throw DimensionMismatch("s_score: one feature set per view required");
  if (module.samples.size() < 3)
    throw LengthMismatch("s_score: need at least 3 samples for correlations");
  for (std::size_t a = 0; a < views.size(); ++a) {
    for (Index j : module.features[a])
      if (j < 0 || j >= views[a].cols())
        throw DimensionMismatch("s_score: feature index out of range");
    for (Index i : module.samples)
      if (i < 0 || i >= views[a].rows())
        throw DimensionMismatch("s_score: sample index out of range");
  }

  const Index t = static_cast<Index>(module.samples.size());
  // restrict each selected column to the sample rows once
  std::vector<std::vector<Vector>> restricted(views.size());
  for (std::size_t a = 0; a < views.size(); ++a) {
    restricted[a].reserve(module.features[a].size());
    for (Index j : module.features[a]) {
      Vector col(t);
      for (Index r = 0; r < t; ++r) col[r] = views[a](module.samples[r], j);
      restricted[a].push_back(std::move(col));
    }
  }

  SScoreDetail out;
  double total = 0.0;
  for (std::size_t a = 0; a < views.size(); ++a) {
    for (std::size_t b = a + 1; b < views.size(); ++b) {
      for (const Vector& x : restricted[a]) {
        for (const Vector& y : restricted[b]) {
          ++out.total_pairs;
          try {
            total += std::abs(pearson(x, y));
          } catch (const ZeroVariance&) {
            ++out.degenerate_pairs;  // contributes 0, stays in N
          }
        }
      }
    }
  }
  if (out.total_pairs == 0)
    throw EmptySelection("s_score: no cross-view pairs");
  out.score = total / double(out.total_pairs);
  return out;
}

double s_score(const CoModule& module, const std::vector<Matrix>& views) {
  return s_score_detail(module, views).score;
}

namespace {

std::vector<Index> sample_without_replacement(std::mt19937_64& rng, Index n,
                                              std::size_t k) {
  // Floyd's algorithm keeps the draw O(k) even for large n.
  std::vector<Index> out;
  out.reserve(k);
  std::vector<bool> taken(static_cast<std::size_t>(n), false);
  for (Index j = n - static_cast<Index>(k); j < n; ++j) {
    std::uniform_int_distribution<Index> dist(0, j);
    Index t = dist(rng);
    if (taken[static_cast<std::size_t>(t)]) t = j;
    taken[static_cast<std::size_t>(t)] = true;
    out.push_back(t);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

double permutation_test(const CoModule& module, const std::vector<Matrix>& views,
                        int n_perm, std::uint64_t seed, int threads) {
  if (n_perm < 1) throw InvalidSpec("permutation_test: n_perm must be >= 1");
  const double observed = s_score(module, views);
  const Index n = views.front().rows();

  std::atomic<long> at_least{0};
  parallel_for(static_cast<std::size_t>(n_perm), threads, [&](std::size_t d) {
    auto rng = make_rng(seed, d);
    CoModule random_module;
    random_module.samples =
        sample_without_replacement(rng, n, module.samples.size());
    for (std::size_t a = 0; a < views.size(); ++a)
      random_module.features.push_back(sample_without_replacement(
          rng, views[a].cols(), module.features[a].size()));
    if (s_score(random_module, views) >= observed) ++at_least;
  });
  return (1.0 + double(at_least.load())) / (double(n_perm) + 1.0);
}

namespace {

Matrix drop_columns(const Matrix& m, const std::vector<Index>& drop_local) {
  if (drop_local.empty()) return m;
  Matrix out(m.rows(), m.cols() - static_cast<Index>(drop_local.size()));
  Index k = 0;
  std::size_t d = 0;
  for (Index j = 0; j < m.cols(); ++j) {
    if (d < drop_local.size() && drop_local[d] == j) {
      ++d;
      continue;
    }
    out.col(k++) = m.col(j);
  }
  return out;
}

Matrix keep_rows(const Matrix& m, const std::vector<Index>& rows) {
  Matrix out(static_cast<Index>(rows.size()), m.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Index>(r)) = m.row(rows[r]);
  return out;
}

}  // namespace

ExtractionResult extract_sequential(const Matrix& X, const Matrix& Y,
                                    const SolverConfig& config,
                                    const ExtractionOptions& options) {
  if (options.rounds < 1)
    throw InvalidSpec("extract_sequential: rounds must be >= 1");
  if (X.rows() != Y.rows())
    throw DimensionMismatch("extract_sequential: X and Y must share samples");

  ExtractionResult result;
  Matrix Xr = X, Yr = Y;
  std::vector<Index> active_rows(static_cast<std::size_t>(X.rows()));
  std::iota(active_rows.begin(), active_rows.end(), Index{0});
  std::vector<Index> cols_x(static_cast<std::size_t>(X.cols()));
  std::iota(cols_x.begin(), cols_x.end(), Index{0});
  std::vector<Index> cols_y(static_cast<std::size_t>(Y.cols()));
  std::iota(cols_y.begin(), cols_y.end(), Index{0});

  for (int round = 0; round < options.rounds; ++round) {
    const Index n_remaining = Xr.rows();
    const bool enough = n_remaining > config.k_w && n_remaining >= 2 &&
                        config.k_u <= Xr.cols() && config.k_v <= Yr.cols();
    if (!enough) {
      if (round == 0 || !options.allow_partial) throw InsufficientSamples(round);
      result.insufficient_at_round = round;
      break;
    }

    // drop columns that went constant on the remaining rows, tracked in
    // original coordinates
    auto drop_x = find_constant_columns(Xr);
    auto drop_y = find_constant_columns(Yr);
    for (Index j : drop_x) result.dropped_columns_x.push_back(cols_x[static_cast<std::size_t>(j)]);
    for (Index j : drop_y) result.dropped_columns_y.push_back(cols_y[static_cast<std::size_t>(j)]);
    if (!drop_x.empty()) {
      Xr = drop_columns(Xr, drop_x);
      std::vector<Index> kept;
      std::size_t d = 0;
      for (std::size_t j = 0; j < cols_x.size(); ++j) {
        if (d < drop_x.size() && drop_x[d] == static_cast<Index>(j)) { ++d; continue; }
        kept.push_back(cols_x[j]);
      }
      cols_x = std::move(kept);
    }
    if (!drop_y.empty()) {
      Yr = drop_columns(Yr, drop_y);
      std::vector<Index> kept;
      std::size_t d = 0;
      for (std::size_t j = 0; j < cols_y.size(); ++j) {
        if (d < drop_y.size() && drop_y[d] == static_cast<Index>(j)) { ++d; continue; }
        kept.push_back(cols_y[j]);
      }
      cols_y = std::move(kept);
    }
    if (config.k_u > Xr.cols() || config.k_v > Yr.cols()) {
      if (round == 0 || !options.allow_partial) throw InsufficientSamples(round);
      result.insufficient_at_round = round;
      break;
    }

    // fresh means/variances on the remaining samples each round
    Standardized Xs = standardize_columns(Xr, options.convention);
    Standardized Ys = standardize_columns(Yr, options.convention);
    WsplsSolution sol = fit(Xs, Ys, config);
    CoModule local = assemble(sol);

    CoModule mapped;
    mapped.source = local.source;
    for (Index i : local.samples) mapped.samples.push_back(active_rows[static_cast<std::size_t>(i)]);
    mapped.features.resize(2);
    for (Index j : local.features[0]) mapped.features[0].push_back(cols_x[static_cast<std::size_t>(j)]);
    for (Index j : local.features[1]) mapped.features[1].push_back(cols_y[static_cast<std::size_t>(j)]);
    mapped.s_score = s_score(mapped, {X, Y});
    result.modules.push_back(std::move(mapped));

    // deflate: delete the module's rows
    std::vector<Index> keep_local;
    for (Index i = 0; i < n_remaining; ++i)
      if (sol.w.values[i] <= 0.0) keep_local.push_back(i);
    std::vector<Index> new_active;
    for (Index i : keep_local) new_active.push_back(active_rows[static_cast<std::size_t>(i)]);
    Xr = keep_rows(Xr, keep_local);
    Yr = keep_rows(Yr, keep_local);
    active_rows = std::move(new_active);
  }
  return result;
}

}  // namespace comodule
