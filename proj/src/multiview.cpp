#include "comodule/multiview.hpp"

#include <cmath>
#include <optional>
#include <utility>

#include "comodule/projections.hpp"
#include "comodule/rng.hpp"

namespace comodule {

void MultiViewData::validate() const {
  if (views.size() < 2)
    throw DimensionMismatch("multiview: need at least 2 views");
  const Index n = views.front().rows();
  for (const auto& v : views)
    if (v.rows() != n)
      throw DimensionMismatch("multiview: views must share the sample dimension");
}

namespace {

void check_state(const std::vector<Vector>& us, const Vector& w,
                 const MultiViewData& data) {
  data.validate();
  if (us.size() != data.views.size())
    throw DimensionMismatch("multiview: one factor per view required");
  for (std::size_t i = 0; i < us.size(); ++i)
    if (us[i].size() != data.views[i].cols())
      throw DimensionMismatch("multiview: factor length mismatch");
  if (w.size() != data.samples())
    throw DimensionMismatch("multiview: weight length mismatch");
}

Vector view_score(const MultiViewData& data, const std::vector<Vector>& us,
                  std::size_t i) {
  return data.views[i].data * us[i];
}

}  // namespace

double objective_sum(const std::vector<Vector>& us, const Vector& w,
                     const MultiViewData& data) {
  check_state(us, w, data);
  const std::size_t m = us.size();
  std::vector<Vector> scores(m);
  for (std::size_t i = 0; i < m; ++i) scores[i] = view_score(data, us, i);
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      total += w.dot(scores[i].cwiseProduct(scores[j]));
  return -total;
}

double objective_prod(const std::vector<Vector>& us, const Vector& w,
                      const MultiViewData& data) {
  check_state(us, w, data);
  Vector z = view_score(data, us, 0);
  for (std::size_t j = 1; j < us.size(); ++j)
    z = z.cwiseProduct(view_score(data, us, j));
  return -w.dot(z);
}

Vector grad_sum_u(std::size_t i, const std::vector<Vector>& us, const Vector& w,
                  const MultiViewData& data) {
  check_state(us, w, data);
  Vector acc;
  bool first = true;
  for (std::size_t j = 0; j < us.size(); ++j) {
    if (j == i) continue;
    Vector term = w.cwiseProduct(view_score(data, us, j));
    if (first) {
      acc = std::move(term);
      first = false;
    } else {
      acc += term;
    }
  }
  return -(data.views[i].data.transpose() * acc);
}

Vector grad_sum_w(const std::vector<Vector>& us, const MultiViewData& data) {
  check_state(us, Vector::Zero(data.samples()), data);
  const std::size_t m = us.size();
  std::vector<Vector> scores(m);
  for (std::size_t i = 0; i < m; ++i) scores[i] = view_score(data, us, i);
  Vector acc;
  bool first = true;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      Vector term = scores[i].cwiseProduct(scores[j]);
      if (first) {
        acc = std::move(term);
        first = false;
      } else {
        acc += term;
      }
    }
  }
  return -acc;
}

Vector grad_prod_u(std::size_t i, const std::vector<Vector>& us, const Vector& w,
                   const MultiViewData& data) {
  check_state(us, w, data);
  Vector z;
  bool first = true;
  for (std::size_t j = 0; j < us.size(); ++j) {
    if (j == i) continue;
    Vector s = view_score(data, us, j);
    if (first) {
      z = std::move(s);
      first = false;
    } else {
      z = z.cwiseProduct(s);
    }
  }
  Vector t = w.cwiseProduct(z);
  return -(data.views[i].data.transpose() * t);
}

Vector grad_prod_w(const std::vector<Vector>& us, const MultiViewData& data) {
  check_state(us, Vector::Zero(data.samples()), data);
  Vector z = view_score(data, us, 0);
  for (std::size_t j = 1; j < us.size(); ++j)
    z = z.cwiseProduct(view_score(data, us, j));
  return -z;
}

namespace {

struct RestartResult {
  std::vector<Vector> us;
  Vector w;
  std::vector<double> trace;
  bool converged = false;
  int iterations = 0;
};

RestartResult run_restart(const MultiViewData& data, const MultiViewConfig& cfg,
                          MultiViewScheme scheme, std::mt19937_64& rng,
                          const MultiViewObserver& observer) {
  const std::size_t m = data.view_count();
  const Index n = data.samples();

  RestartResult r;
  r.us.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    Vector draw = normal_vector(rng, data.views[i].cols());
    r.us[i] = top_k_unit(draw, cfg.budgets[i]).vector;
  }
  r.w = Vector::Ones(n);

  for (int t = 1; t <= cfg.max_iter; ++t) {
    for (std::size_t i = 0; i < m; ++i) {
      Vector g = scheme == MultiViewScheme::Sum
                     ? grad_sum_u(i, r.us, r.w, data)
                     : grad_prod_u(i, r.us, r.w, data);
      Vector shifted = r.us[i] - g / cfg.L_u;
      try {
        r.us[i] = top_k_unit(shifted, cfg.budgets[i]).vector;
      } catch (const ZeroInput&) {
        throw DegenerateStep("zero proximal point in view " + std::to_string(i));
      }
    }
    Vector gw = scheme == MultiViewScheme::Sum ? grad_sum_w(r.us, data)
                                               : grad_prod_w(r.us, data);
    Vector shifted = r.w - gw / cfg.L_w;
    r.w = project_weight(shifted, cfg.k_w).vector;

    const double f = scheme == MultiViewScheme::Sum
                         ? objective_sum(r.us, r.w, data)
                         : objective_prod(r.us, r.w, data);
    r.trace.push_back(f);
    r.iterations = t;
    if (observer) observer(MultiViewSnapshot{t, r.us, r.w, f});

    if (t >= 2) {
      const double prev = r.trace[static_cast<std::size_t>(t) - 2];
      const double rel = std::abs(f - prev) / std::max(std::abs(prev), 1e-300);
      if (rel < cfg.tol) {
        r.converged = true;
        break;
      }
    }
  }
  return r;
}

MwsplsSolution fit_scheme(const MultiViewData& data, const MultiViewConfig& cfg,
                          MultiViewScheme scheme,
                          const MultiViewObserver& observer) {
  data.validate();
  if (cfg.budgets.size() != data.view_count())
    throw BadBudget("multiview: one budget per view required");
  for (std::size_t i = 0; i < cfg.budgets.size(); ++i)
    if (cfg.budgets[i] < 1 || cfg.budgets[i] > data.views[i].cols())
      throw BadBudget("multiview: factor budget out of range");
  if (cfg.k_w < 1 || cfg.k_w > data.samples())
    throw BadBudget("multiview: weight budget out of range");
  if (cfg.restarts < 1) throw BadBudget("multiview: restarts must be >= 1");
  if (cfg.L_u <= 0 || cfg.L_w <= 0 || cfg.tol <= 0)
    throw BadBudget("multiview: step constants and tolerance must be positive");

  std::optional<RestartResult> best;
  int best_restart = 0;
  int failures = 0;
  for (int restart = 0; restart < cfg.restarts; ++restart) {
    auto rng = make_rng(cfg.seed, static_cast<std::uint64_t>(restart));
    try {
      RestartResult r = run_restart(data, cfg, scheme, rng, observer);
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

  MwsplsSolution sol;
  sol.factors.reserve(best->us.size());
  for (std::size_t i = 0; i < best->us.size(); ++i)
    sol.factors.push_back(FactorVector{std::move(best->us[i]), cfg.budgets[i]});
  sol.w = WeightVector{std::move(best->w), cfg.k_w};
  sol.objective_trace = std::move(best->trace);
  sol.converged = best->converged;
  sol.iterations = best->iterations;
  sol.restart_index = best_restart;
  sol.scheme = scheme;
  return sol;
}

}  // namespace

MwsplsSolution fit_sum(const MultiViewData& data, const MultiViewConfig& config,
                       const MultiViewObserver& observer) {
  return fit_scheme(data, config, MultiViewScheme::Sum, observer);
}

MwsplsSolution fit_prod(const MultiViewData& data, const MultiViewConfig& config,
                        const MultiViewObserver& observer) {
  return fit_scheme(data, config, MultiViewScheme::Product, observer);
}

}  // namespace comodule
