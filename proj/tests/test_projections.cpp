#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "comodule/projections.hpp"
#include "helpers.hpp"

using namespace comodule;
using testutil::oracle_project_weight;
using testutil::oracle_top_k_unit;
using testutil::random_vector;

TEST_CASE("top_k_unit: definitional example") {
  Vector z(3);
  z << 3, 0, -1;
  auto r = top_k_unit(z, 2);
  const double s = std::sqrt(10.0);
  CHECK(r.vector[0] == doctest::Approx(3.0 / s).epsilon(1e-14));
  CHECK(r.vector[1] == 0.0);
  CHECK(r.vector[2] == doctest::Approx(-1.0 / s).epsilon(1e-14));
  CHECK(r.support == std::vector<Index>{0, 2});
}

TEST_CASE("top_k_unit: full budget just normalizes") {
  Vector z = random_vector(5, 7);
  auto r = top_k_unit(z, 7);
  CHECK((r.vector - z / z.norm()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("top_k_unit: ties keep the lower index") {
  Vector z(3);
  z << 1, -1, 1;
  auto r = top_k_unit(z, 2);
  CHECK(r.support == std::vector<Index>{0, 1});
  CHECK(r.vector[0] == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(r.vector[1] == doctest::Approx(-1.0 / std::sqrt(2.0)));
  CHECK(r.vector[2] == 0.0);
}

TEST_CASE("top_k_unit: fewer nonzeros than the budget") {
  Vector z(4);
  z << 2, 0, 0, 0;
  auto r = top_k_unit(z, 3);
  CHECK(r.vector[0] == 1.0);
  CHECK(r.support == std::vector<Index>{0});
}

TEST_CASE("top_k_unit: scale invariance in the positive direction") {
  for (int trial = 0; trial < 20; ++trial) {
    Vector z = random_vector(100 + trial, 9);
    auto a = top_k_unit(z, 4);
    auto b = top_k_unit((3.7 * z).eval(), 4);
    CHECK((a.vector - b.vector).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("top_k_unit: errors") {
  CHECK_THROWS_AS(top_k_unit(Vector::Zero(4), 2), ZeroInput);
  Vector z = random_vector(6, 4);
  CHECK_THROWS_AS(top_k_unit(z, 0), BadBudget);
  CHECK_THROWS_AS(top_k_unit(z, 5), BadBudget);
}

TEST_CASE("top_k_unit: equals the enumeration oracle") {
  for (int trial = 0; trial < 300; ++trial) {
    auto rng = make_rng(4242, trial);
    const Index n = 1 + trial % 8;
    Vector z = normal_vector(rng, n);
    for (Index k = 1; k <= n; ++k) {
      auto got = top_k_unit(z, k);
      auto want = oracle_top_k_unit(z, k);
      CHECK((got.vector - z).squaredNorm() <= want.objective + 1e-12);
      // generic |z| has no ties, so the argmin is unique
      CHECK((got.vector - want.argmin).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("clamp_box: per-case example, fixed point, idempotence") {
  Vector w(3);
  w << -0.5, 0.3, 1.7;
  Vector c = clamp_box(w);
  CHECK(c[0] == 0.0);
  CHECK(c[1] == 0.3);
  CHECK(c[2] == 1.0);

  Vector in(4);
  in << 0.0, 0.25, 0.75, 1.0;
  CHECK((clamp_box(in) - in).cwiseAbs().maxCoeff() == 0.0);

  for (int trial = 0; trial < 20; ++trial) {
    Vector r = 3.0 * random_vector(200 + trial, 11);
    Vector once = clamp_box(r);
    CHECK((clamp_box(once) - once).cwiseAbs().maxCoeff() == 0.0);
    CHECK(once.minCoeff() >= 0.0);
    CHECK(once.maxCoeff() <= 1.0);
  }
}

TEST_CASE("project_weight: all-ones keeps the lowest k indices") {
  auto r = project_weight(Vector::Ones(6), 4);
  CHECK(r.support == std::vector<Index>{0, 1, 2, 3});
  for (Index i : r.support) CHECK(r.vector[i] == 1.0);
  CHECK(r.vector[4] == 0.0);
  CHECK(r.vector[5] == 0.0);
}

TEST_CASE("project_weight: clamp then keep top-2") {
  Vector w(4);
  w << -1, 0.5, 2, 0.4;
  auto r = project_weight(w, 2);
  Vector want(4);
  want << 0, 0.5, 1, 0;
  CHECK((r.vector - want).cwiseAbs().maxCoeff() == 0.0);
  CHECK(r.support == std::vector<Index>{1, 2});
}

TEST_CASE("project_weight: support lists exactly the nonzero positions") {
  Vector w(5);
  w << -2, -1, 0.7, -0.1, 0.2;
  auto r = project_weight(w, 4);  // only two positive entries survive the clamp
  CHECK(r.support == std::vector<Index>{2, 4});
}

TEST_CASE("project_weight: idempotent and oracle-exact") {
  for (int trial = 0; trial < 300; ++trial) {
    auto rng = make_rng(5555, trial);
    const Index n = 1 + trial % 8;
    Vector w = 2.0 * normal_vector(rng, n);
    for (Index k = 1; k <= n; ++k) {
      auto got = project_weight(w, k);
      auto want = oracle_project_weight(w, k);
      CHECK((got.vector - w).squaredNorm() <= want.objective + 1e-12);
      CHECK(got.vector.minCoeff() >= 0.0);
      CHECK(got.vector.maxCoeff() <= 1.0);
      CHECK(static_cast<Index>(got.support.size()) <= k);
      auto again = project_weight(got.vector, k);
      CHECK((again.vector - got.vector).cwiseAbs().maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("project_weight: budget validation") {
  CHECK_THROWS_AS(project_weight(Vector::Ones(3), 0), BadBudget);
  CHECK_THROWS_AS(project_weight(Vector::Ones(3), 4), BadBudget);
}

TEST_CASE("l1_unit_project: inactive bound returns the normalized input") {
  Vector a = random_vector(301, 6);
  Vector x = l1_unit_project(a, std::sqrt(6.0));
  CHECK((x - a / a.norm()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("l1_unit_project: extreme sparsity with a tie picks the lowest index") {
  Vector a(2);
  a << 1, 1;
  Vector x = l1_unit_project(a, 1.0);
  CHECK(x[0] == 1.0);
  CHECK(x[1] == 0.0);
}

TEST_CASE("l1_unit_project: grid-search oracle at c = 1.2") {
  for (int trial = 0; trial < 25; ++trial) {
    auto rng = make_rng(6001, trial);
    Vector a = normal_vector(rng, 8);
    const double c = 1.2;
    Vector x = l1_unit_project(a, c);
    CHECK(std::abs(x.norm() - 1.0) < 1e-12);
    CHECK(x.lpNorm<1>() <= c + 1e-6);

    // dense threshold grid: best feasible candidate maximizes a'x
    double best = -1e300;
    const double hi = a.cwiseAbs().maxCoeff();
    for (int g = 0; g < 20000; ++g) {
      const double lambda = hi * double(g) / 20000.0;
      Vector s(a.size());
      for (Index i = 0; i < a.size(); ++i) {
        const double m = std::abs(a[i]) - lambda;
        s[i] = m > 0 ? (a[i] > 0 ? m : -m) : 0.0;
      }
      if (s.squaredNorm() == 0.0) continue;
      s /= s.norm();
      if (s.lpNorm<1>() <= c + 1e-9) best = std::max(best, a.dot(s));
    }
    CHECK(a.dot(x) >= best - 1e-4);
  }
}

TEST_CASE("l1_unit_project: errors") {
  Vector a = random_vector(310, 5);
  CHECK_THROWS_AS(l1_unit_project(a, 0.9), Infeasible);
  CHECK_THROWS_AS(l1_unit_project(Vector::Zero(5), 1.5), ZeroInput);
}
