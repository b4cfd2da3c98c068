#pragma once

// Shared test fixtures and independent oracles. Everything here recomputes
// expectations from first principles; nothing calls back into the solver
// paths under test.

#include <bitset>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "comodule/core.hpp"
#include "comodule/rng.hpp"
#include "comodule/types.hpp"

namespace testutil {

using comodule::Index;
using comodule::Matrix;
using comodule::Vector;

// --- enumeration oracles (vectors of length <= 8) ---

struct OracleResult {
  double objective = std::numeric_limits<double>::infinity();  // min ||x - z||^2
  Vector argmin;
};

// Exhaustive minimizer of ||x - z||^2 over {x : ||x||_0 <= k, ||x|| = 1}:
// enumerate supports, restrict-and-normalize, pick the best.
inline OracleResult oracle_top_k_unit(const Vector& z, Index k) {
  const Index n = z.size();
  OracleResult best;
  for (unsigned long mask = 1; mask < (1UL << n); ++mask) {
    if (static_cast<Index>(std::bitset<8>(mask).count()) > k) continue;
    Vector x = Vector::Zero(n);
    for (Index i = 0; i < n; ++i)
      if (mask & (1UL << i)) x[i] = z[i];
    const double norm = x.norm();
    if (norm == 0.0) continue;
    x /= norm;
    const double obj = (x - z).squaredNorm();
    if (obj < best.objective) {
      best.objective = obj;
      best.argmin = x;
    }
  }
  return best;
}

// Exhaustive minimizer of ||x - w||^2 over {x : x in [0,1]^n, ||x||_0 <= k}:
// per kept coordinate the optimum clamps to [0,1]; dropped coordinates cost
// w_i^2.
inline OracleResult oracle_project_weight(const Vector& w, Index k) {
  const Index n = w.size();
  OracleResult best;
  for (unsigned long mask = 0; mask < (1UL << n); ++mask) {
    if (static_cast<Index>(std::bitset<8>(mask).count()) > k) continue;
    Vector x = Vector::Zero(n);
    for (Index i = 0; i < n; ++i)
      if (mask & (1UL << i)) x[i] = std::min(1.0, std::max(0.0, w[i]));
    const double obj = (x - w).squaredNorm();
    if (obj < best.objective) {
      best.objective = obj;
      best.argmin = x;
    }
  }
  return best;
}

// --- finite differences ---

// Central difference gradient of f at x; exact for objectives linear in x up
// to rounding.
inline Vector central_difference(const std::function<double(const Vector&)>& f,
                                 const Vector& x, double h = 1e-6) {
  Vector g(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    Vector hi = x, lo = x;
    hi[i] += h;
    lo[i] -= h;
    g[i] = (f(hi) - f(lo)) / (2.0 * h);
  }
  return g;
}

inline double relative_gap(const Vector& a, const Vector& b) {
  const double scale = std::max({a.norm(), b.norm(), 1e-12});
  return (a - b).norm() / scale;
}

// --- planted data ---

struct PlantedPair {
  Matrix X, Y;
  Vector u, v, w;  // sign/weight patterns
};

// X = w u' + gamma1 E1, Y = w v' + gamma2 E2 with the noise scale chosen so
// ||w||^2 ||u||^2 / (gamma^2 n p) = snr.
inline PlantedPair make_planted_pair(Index n, Index p, Index q, Index u_half,
                                     Index v_half, Index w_ones, double snr,
                                     std::uint64_t seed) {
  PlantedPair out;
  out.u = Vector::Zero(p);
  for (Index i = 0; i < u_half; ++i) out.u[i] = 1.0;
  for (Index i = 0; i < u_half; ++i) out.u[u_half + i] = -1.0;
  out.v = Vector::Zero(q);
  for (Index i = 0; i < v_half; ++i) out.v[i] = -1.0;
  for (Index i = 0; i < v_half; ++i) out.v[v_half + i] = 1.0;
  out.w = Vector::Zero(n);
  for (Index i = 0; i < w_ones; ++i) out.w[i] = 1.0;

  const double g1 = std::sqrt(out.w.squaredNorm() * out.u.squaredNorm() /
                              (snr * double(n) * double(p)));
  const double g2 = std::sqrt(out.w.squaredNorm() * out.v.squaredNorm() /
                              (snr * double(n) * double(q)));
  auto rng = comodule::make_rng(seed, 12345);
  out.X = out.w * out.u.transpose() + g1 * comodule::normal_matrix(rng, n, p);
  out.Y = out.w * out.v.transpose() + g2 * comodule::normal_matrix(rng, n, q);
  return out;
}

inline std::vector<Index> support_of(const Vector& v) {
  std::vector<Index> s;
  for (Index i = 0; i < v.size(); ++i)
    if (v[i] != 0.0) s.push_back(i);
  return s;
}

inline Matrix random_matrix(std::uint64_t seed, Index rows, Index cols) {
  auto rng = comodule::make_rng(seed, 777);
  return comodule::normal_matrix(rng, rows, cols);
}

inline Vector random_vector(std::uint64_t seed, Index len) {
  auto rng = comodule::make_rng(seed, 778);
  return comodule::normal_vector(rng, len);
}

}  // namespace testutil
