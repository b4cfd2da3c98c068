#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "comodule/baselines.hpp"
#include "comodule/projections.hpp"
#include "comodule/solver.hpp"
#include "helpers.hpp"

using namespace comodule;
using testutil::central_difference;
using testutil::make_planted_pair;
using testutil::random_matrix;
using testutil::random_vector;
using testutil::relative_gap;
using testutil::support_of;

namespace {

struct Instance {
  Matrix X, Y;
  Vector u, v, w;
};

Instance random_instance(std::uint64_t seed, Index n = 12, Index p = 8,
                         Index q = 10) {
  auto rng = make_rng(seed, 9);
  Instance in;
  in.X = normal_matrix(rng, n, p);
  in.Y = normal_matrix(rng, n, q);
  in.u = top_k_unit(normal_vector(rng, p), p / 2).vector;
  in.v = top_k_unit(normal_vector(rng, q), q / 2).vector;
  in.w = clamp_box(normal_vector(rng, n));
  return in;
}

}  // namespace

TEST_CASE("gradients: zero weights zero the factor gradients") {
  auto in = random_instance(1);
  in.w.setZero();
  CHECK(grad_u(in.u, in.v, in.w, in.X, in.Y).cwiseAbs().maxCoeff() == 0.0);
  CHECK(grad_v(in.u, in.v, in.w, in.X, in.Y).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("gradients: finite-difference agreement on 20 random instances") {
  for (int trial = 0; trial < 20; ++trial) {
    auto in = random_instance(100 + trial);
    auto fu = [&](const Vector& u) { return objective(u, in.v, in.w, in.X, in.Y); };
    auto fv = [&](const Vector& v) { return objective(in.u, v, in.w, in.X, in.Y); };
    auto fw = [&](const Vector& w) { return objective(in.u, in.v, w, in.X, in.Y); };
    CHECK(relative_gap(grad_u(in.u, in.v, in.w, in.X, in.Y),
                       central_difference(fu, in.u)) < 1e-5);
    CHECK(relative_gap(grad_v(in.u, in.v, in.w, in.X, in.Y),
                       central_difference(fv, in.v)) < 1e-5);
    CHECK(relative_gap(grad_w(in.u, in.v, in.w, in.X, in.Y),
                       central_difference(fw, in.w)) < 1e-5);
  }
}

TEST_CASE("gradients: shared-view weight gradient is the elementwise score product") {
  auto rng = make_rng(7, 3);
  Matrix X = normal_matrix(rng, 9, 6);
  Vector u = normal_vector(rng, 6), v = normal_vector(rng, 6);
  Vector g = grad_w(u, v, Vector::Ones(9), X, X);
  Vector xu = X * u, xv = X * v;
  for (Index i = 0; i < 9; ++i)
    CHECK(g[i] == doctest::Approx(-xu[i] * xv[i]).epsilon(1e-12));
}

TEST_CASE("step_u: fixed point when the gradient vanishes") {
  auto in = random_instance(11);
  in.w.setZero();  // grad_u = 0
  Vector u = top_k_unit(random_vector(12, 8), 3).vector;
  Vector next = step_u(u, in.v, in.w, in.X, in.Y, 3, 1.0);
  CHECK((next - u).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("step_u: small L approaches the pure gradient projection") {
  auto in = random_instance(13);
  Vector g = grad_u(in.u, in.v, in.w, in.X, in.Y);
  Vector limit = top_k_unit((-g).eval(), 4).vector;
  Vector stepped = step_u(in.u, in.v, in.w, in.X, in.Y, 4, 1e-6);
  CHECK((stepped - limit).cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("steps recompose the projection operators") {
  for (int trial = 0; trial < 10; ++trial) {
    auto in = random_instance(200 + trial);
    const double L = 0.5 + 0.25 * trial;

    Vector ubar = in.u - grad_u(in.u, in.v, in.w, in.X, in.Y) / L;
    CHECK((step_u(in.u, in.v, in.w, in.X, in.Y, 3, L) -
           top_k_unit(ubar, 3).vector)
              .cwiseAbs()
              .maxCoeff() == 0.0);

    Vector vbar = in.v - grad_v(in.u, in.v, in.w, in.X, in.Y) / L;
    CHECK((step_v(in.u, in.v, in.w, in.X, in.Y, 5, L) -
           top_k_unit(vbar, 5).vector)
              .cwiseAbs()
              .maxCoeff() == 0.0);

    Vector wbar = in.w - grad_w(in.u, in.v, in.w, in.X, in.Y) / L;
    CHECK((step_w(in.u, in.v, in.w, in.X, in.Y, 6, L) -
           project_weight(wbar, 6).vector)
              .cwiseAbs()
              .maxCoeff() == 0.0);
    CHECK((step_w_l2(in.u, in.v, in.w, in.X, in.Y, 6, L) -
           top_k_unit(wbar, 6).vector)
              .cwiseAbs()
              .maxCoeff() == 0.0);
  }
}

TEST_CASE("step_w: clamp kills nonpositive shifts, saturates large ones") {
  // scores with all-negative elementwise product and w = 0: stays at 0
  Matrix X = Matrix::Ones(4, 2), Y = -Matrix::Ones(4, 3);
  Vector u = Vector::Unit(2, 0), v = Vector::Unit(3, 0);
  Vector w0 = Vector::Zero(4);
  Vector next = step_w(u, v, w0, X, Y, 2, 1.0);
  CHECK(next.cwiseAbs().maxCoeff() == 0.0);

  // product >= L_w with w = 1: k_w saturated ones
  Matrix Y2 = Matrix::Ones(4, 3);
  Vector w1 = Vector::Ones(4);
  Vector sat = step_w(u, v, w1, X, Y2, 2, 1.0);
  CHECK(sat.sum() == 2.0);
  CHECK(sat.maxCoeff() == 1.0);
}

TEST_CASE("step_u: degenerate shifted point throws") {
  // 1-column views with the gradient exactly canceling u
  Matrix X = Matrix::Ones(2, 1), Y = Matrix::Ones(2, 1);
  Vector u = Vector::Constant(1, -1.0);  // feasible: unit norm
  Vector v = Vector::Constant(1, 1.0);
  Vector w = Vector::Constant(2, 0.5);
  // grad_u = -X'[w .* (Yv)] = -1, so ubar = -1 + 1/L = 0 at L = 1
  CHECK_THROWS_AS(step_u(u, v, w, X, Y, 1, 1.0), DegenerateStep);
}

TEST_CASE("fit: recovers planted supports in the near-noiseless limit") {
  auto planted = make_planted_pair(50, 80, 100, 10, 15, 25, 1e6, 31);
  SolverConfig cfg;
  cfg.k_u = 20;
  cfg.k_v = 30;
  cfg.k_w = 25;
  cfg.restarts = 5;
  cfg.seed = 31;
  auto sol = fit(Standardized::given(planted.X), Standardized::given(planted.Y), cfg);
  CHECK(sol.u.support() == support_of(planted.u));
  CHECK(sol.v.support() == support_of(planted.v));
  CHECK(sol.w.support() == support_of(planted.w));
}

TEST_CASE("fit: objective trace never increases (slack 1e-9)") {
  for (int trial = 0; trial < 20; ++trial) {
    auto rng = make_rng(400, trial);
    const Index n = 8 + trial % 10, p = 5 + trial % 9, q = 4 + trial % 12;
    Matrix X = normal_matrix(rng, n, p), Y = normal_matrix(rng, n, q);
    SolverConfig cfg;
    cfg.k_u = 1 + trial % p;
    cfg.k_v = 1 + (trial / 2) % q;
    cfg.k_w = 1 + trial % n;
    cfg.seed = trial;
    cfg.restarts = 2;
    auto sol = fit(Standardized::given(X), Standardized::given(Y), cfg);
    for (std::size_t t = 1; t < sol.objective_trace.size(); ++t)
      CHECK(sol.objective_trace[t] <= sol.objective_trace[t - 1] + 1e-9);
  }
}

TEST_CASE("fit: feasible at every iteration, not just at exit") {
  auto rng = make_rng(57, 0);
  Matrix X = normal_matrix(rng, 15, 9), Y = normal_matrix(rng, 15, 11);
  SolverConfig cfg;
  cfg.k_u = 4;
  cfg.k_v = 5;
  cfg.k_w = 7;
  cfg.seed = 99;
  int snapshots = 0;
  auto observer = [&](const IterateSnapshot& s) {
    ++snapshots;
    CHECK(std::abs(s.u.norm() - 1.0) < 1e-10);
    CHECK(std::abs(s.v.norm() - 1.0) < 1e-10);
    CHECK(static_cast<Index>(testutil::support_of(s.u).size()) <= 4);
    CHECK(static_cast<Index>(testutil::support_of(s.v).size()) <= 5);
    CHECK(static_cast<Index>(testutil::support_of(s.w).size()) <= 7);
    CHECK(s.w.minCoeff() >= 0.0);
    CHECK(s.w.maxCoeff() <= 1.0);
  };
  fit(Standardized::given(X), Standardized::given(Y), cfg, observer);
  CHECK(snapshots > 0);
}

TEST_CASE("fit: identical seeds give bitwise-identical traces") {
  auto rng = make_rng(58, 0);
  Matrix X = normal_matrix(rng, 12, 7), Y = normal_matrix(rng, 12, 8);
  SolverConfig cfg;
  cfg.k_u = 3;
  cfg.k_v = 4;
  cfg.k_w = 5;
  cfg.seed = 1234;
  auto a = fit(Standardized::given(X), Standardized::given(Y), cfg);
  auto b = fit(Standardized::given(X), Standardized::given(Y), cfg);
  REQUIRE(a.objective_trace.size() == b.objective_trace.size());
  for (std::size_t i = 0; i < a.objective_trace.size(); ++i)
    CHECK(a.objective_trace[i] == b.objective_trace[i]);
  cfg.seed = 1235;
  auto c = fit(Standardized::given(X), Standardized::given(Y), cfg);
  CHECK(a.objective_trace.back() != c.objective_trace.back());
}

TEST_CASE("fit: pinned weights reproduce the l0 alternating scheme exactly") {
  for (int trial = 0; trial < 10; ++trial) {
    auto rng = make_rng(600, trial);
    Matrix X = normal_matrix(rng, 14, 9), Y = normal_matrix(rng, 14, 12);
    SolverConfig cfg;
    cfg.k_u = 4;
    cfg.k_v = 6;
    cfg.pin_w = true;
    cfg.stop_rule = StopRule::ObjectiveChange;
    cfg.seed = 9000 + trial;
    cfg.restarts = 3;
    auto pinned = fit(Standardized::given(X), Standardized::given(Y), cfg);
    auto plain = l0_spls(Standardized::given(X), Standardized::given(Y), 4, 6, cfg);
    REQUIRE(pinned.objective_trace.size() == plain.objective_trace.size());
    for (std::size_t i = 0; i < pinned.objective_trace.size(); ++i)
      CHECK(pinned.objective_trace[i] == -plain.objective_trace[i]);
    CHECK((pinned.u.values - plain.u).cwiseAbs().maxCoeff() == 0.0);
    CHECK((pinned.v.values - plain.v).cwiseAbs().maxCoeff() == 0.0);
    CHECK(pinned.w.values.minCoeff() == 1.0);  // pinned w stays all-ones
  }
}

TEST_CASE("fit_l2_variant: single-sample budget gives a signed coordinate vector") {
  auto rng = make_rng(61, 0);
  Matrix X = normal_matrix(rng, 10, 6), Y = normal_matrix(rng, 10, 7);
  SolverConfig cfg;
  cfg.k_u = 3;
  cfg.k_v = 3;
  cfg.k_w = 1;
  cfg.seed = 5;
  auto sol = fit_l2_variant(Standardized::given(X), Standardized::given(Y), cfg);
  CHECK(sol.w.support().size() == 1);
  CHECK(std::abs(std::abs(sol.w.values[sol.w.support()[0]]) - 1.0) < 1e-12);
}

TEST_CASE("fit_l2_variant: unit weight norm and monotone trace") {
  auto rng = make_rng(62, 0);
  Matrix X = normal_matrix(rng, 16, 9), Y = normal_matrix(rng, 16, 10);
  SolverConfig cfg;
  cfg.k_u = 4;
  cfg.k_v = 5;
  cfg.k_w = 6;
  cfg.seed = 17;
  auto sol = fit_l2_variant(Standardized::given(X), Standardized::given(Y), cfg);
  CHECK(std::abs(sol.w.values.norm() - 1.0) < 1e-10);
  CHECK(static_cast<Index>(sol.w.support().size()) <= 6);
  for (std::size_t t = 1; t < sol.objective_trace.size(); ++t)
    CHECK(sol.objective_trace[t] <= sol.objective_trace[t - 1] + 1e-9);
}

TEST_CASE("fit: configuration validation") {
  auto rng = make_rng(63, 0);
  Matrix X = normal_matrix(rng, 8, 5), Y = normal_matrix(rng, 8, 6);
  SolverConfig cfg;
  cfg.k_u = 6;  // > p
  cfg.k_v = 2;
  cfg.k_w = 2;
  CHECK_THROWS_AS(fit(Standardized::given(X), Standardized::given(Y), cfg),
                  BadBudget);
  cfg.k_u = 2;
  Matrix Z = normal_matrix(rng, 9, 6);
  CHECK_THROWS_AS(fit(Standardized::given(X), Standardized::given(Z), cfg),
                  DimensionMismatch);
}

TEST_CASE("fit: stop rules behave as configured") {
  auto rng = make_rng(64, 0);
  Matrix X = normal_matrix(rng, 10, 6), Y = normal_matrix(rng, 10, 7);
  SolverConfig cfg;
  cfg.k_u = 2;
  cfg.k_v = 3;
  cfg.k_w = 4;
  cfg.seed = 3;

  cfg.tol = 1e3;  // fires at the first check
  auto fast = fit(Standardized::given(X), Standardized::given(Y), cfg);
  CHECK(fast.converged);
  CHECK(fast.iterations == 2);

  cfg.tol = 1e-300;  // cannot fire while the objective still moves
  cfg.max_iter = 3;
  auto slow = fit(Standardized::given(X), Standardized::given(Y), cfg);
  CHECK_FALSE(slow.converged);
  CHECK(slow.iterations == 3);
}
