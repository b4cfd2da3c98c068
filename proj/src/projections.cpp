#include "comodule/projections.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace comodule {

std::vector<Index> top_k_indices(const Vector& z, Index k) {
  const Index n = z.size();
  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  // total order: |z| descending, index ascending
  auto cmp = [&z](Index a, Index b) {
    const double fa = std::abs(z[a]), fb = std::abs(z[b]);
    if (fa != fb) return fa > fb;
    return a < b;
  };
  if (k < n) std::nth_element(idx.begin(), idx.begin() + k, idx.end(), cmp);
  idx.resize(static_cast<std::size_t>(k));
  std::sort(idx.begin(), idx.end());
  return idx;
}

ProjectionResult top_k_unit(const Vector& z, Index k) {
  if (k < 1 || k > z.size()) throw BadBudget("top_k_unit: k out of range");
  if (z.squaredNorm() == 0.0) throw ZeroInput("top_k_unit: zero input");

  ProjectionResult out;
  out.vector = Vector::Zero(z.size());
  auto kept = top_k_indices(z, k);
  for (Index i : kept) out.vector[i] = z[i];
  out.vector /= out.vector.norm();  // norm > 0: the top entry of z is nonzero
  for (Index i : kept)
    if (out.vector[i] != 0.0) out.support.push_back(i);
  return out;
}

Vector clamp_box(const Vector& w) {
  return w.cwiseMax(0.0).cwiseMin(1.0);
}

ProjectionResult project_weight(const Vector& w_bar, Index k_w) {
  if (k_w < 1 || k_w > w_bar.size())
    throw BadBudget("project_weight: k_w out of range");

  // The gain of keeping coordinate i is w_i^2 - (clamp(w_i) - w_i)^2, which
  // is strictly increasing in w_i for w_i > 0 and zero otherwise. Ranking by
  // the raw shifted value therefore yields the exact minimizer even when
  // several entries saturate the box at 1.
  const Index n = w_bar.size();
  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  auto cmp = [&w_bar](Index a, Index b) {
    if (w_bar[a] != w_bar[b]) return w_bar[a] > w_bar[b];
    return a < b;
  };
  if (k_w < n) std::nth_element(idx.begin(), idx.begin() + k_w, idx.end(), cmp);
  idx.resize(static_cast<std::size_t>(k_w));
  std::sort(idx.begin(), idx.end());

  Vector clamped = clamp_box(w_bar);
  ProjectionResult out;
  out.vector = Vector::Zero(n);
  for (Index i : idx) {
    out.vector[i] = clamped[i];
    if (clamped[i] != 0.0) out.support.push_back(i);
  }
  return out;
}

namespace {

Vector soft_threshold(const Vector& a, double lambda) {
  Vector s(a.size());
  for (Index i = 0; i < a.size(); ++i) {
    const double mag = std::abs(a[i]) - lambda;
    s[i] = mag > 0.0 ? (a[i] > 0.0 ? mag : -mag) : 0.0;
  }
  return s;
}

}  // namespace

Vector l1_unit_project(const Vector& a, double c) {
  if (c < 1.0) throw Infeasible("l1_unit_project: c < 1 leaves no unit vector");
  const double norm_a = a.norm();
  if (norm_a == 0.0) throw ZeroInput("l1_unit_project: zero input");

  Vector x = a / norm_a;
  if (x.lpNorm<1>() <= c) return x;  // threshold 0 already feasible

  double lo = 0.0, hi = a.cwiseAbs().maxCoeff();
  for (int iter = 0; iter < 200 && hi - lo > 1e-12; ++iter) {
    const double mid = 0.5 * (lo + hi);
    Vector s = soft_threshold(a, mid);
    const double ns = s.norm();
    if (ns == 0.0) {
      hi = mid;
      continue;
    }
    const double l1 = s.lpNorm<1>() / ns;
    if (std::abs(l1 - c) <= 1e-6) {
      lo = hi = mid;
      break;
    }
    if (l1 > c)
      lo = mid;
    else
      hi = mid;
  }

  Vector s = soft_threshold(a, hi);
  if (s.squaredNorm() > 0.0) {
    x = s / s.norm();
    if (x.lpNorm<1>() <= c + 1e-6) return x;
  }
  // tied maxima block the soft-threshold path below sqrt(#ties); pick the
  // lowest-index maximum.
  Index best = 0;
  for (Index i = 1; i < a.size(); ++i)
    if (std::abs(a[i]) > std::abs(a[best])) best = i;
  x = Vector::Zero(a.size());
  x[best] = a[best] > 0.0 ? 1.0 : -1.0;
  return x;
}

}  // namespace comodule
