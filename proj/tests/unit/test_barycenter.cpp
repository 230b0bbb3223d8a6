#include "psdbw/ai.hpp"
#include "psdbw/barycenter.hpp"
#include "psdbw/bw.hpp"
#include "psdbw/error.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace psdbw;
using testing_support::Gen;
using testing_support::rel_err;

namespace {

constexpr Algorithm kAll[] = {Algorithm::Inductive, Algorithm::Projection, Algorithm::Cheap};

SymMatrix scalar(double x) { return SymMatrix::diagonal(std::vector<double>{x}); }

std::vector<SymMatrix> spd_set(Gen& gen, int n, int m) {
  std::vector<SymMatrix> out;
  for (int i = 0; i < m; ++i) out.push_back(gen.spd(n));
  return out;
}

}  // namespace

TEST_SUITE("barycenter") {
  TEST_CASE("single input") {
    Gen gen(1);
    const std::vector<SymMatrix> one{gen.spd(4)};
    const BarycenterResult r = inductive_mean(bw_geometry(), one);
    CHECK(r.converged);
    CHECK(r.iterations == 1);
    CHECK(rel_err(r.mean, one[0]) <= 1e-14);
    for (Algorithm algo : kAll) CHECK(rel_err(barycenter(algo, bw_geometry(), one).mean, one[0]) <= 1e-12);
  }

  TEST_CASE("identical inputs are fixed points") {
    Gen gen(2);
    const SymMatrix a = gen.spd(5);
    const std::vector<SymMatrix> same(4, a);
    for (Algorithm algo : {Algorithm::Projection, Algorithm::Cheap}) {
      const BarycenterResult r = barycenter(algo, bw_geometry(), same);
      CHECK(r.converged);
      CHECK(r.iterations <= 1);
      CHECK(rel_err(r.mean, a) <= 1e-10);
    }
  }

  TEST_CASE("scalar closed form") {
    // BW is flat in sqrt coordinates for 1x1 inputs: mean = (mean of roots)^2.
    const std::vector<SymMatrix> xs{scalar(1.0), scalar(4.0), scalar(16.0)};
    const SolverConfig cfg;
    for (Algorithm algo : kAll) {
      const BarycenterResult r = barycenter(algo, bw_geometry(), xs, cfg);
      CHECK(r.converged);
      CHECK(std::abs(r.mean(0, 0) - 49.0 / 9.0) <= cfg.epsilon);
    }
  }

  TEST_CASE("two inputs give the pair mean") {
    Gen gen(3);
    const SolverConfig cfg;
    for (int trial = 0; trial < 20; ++trial) {
      const int n = gen.integer(1, 12);
      const std::vector<SymMatrix> ab = spd_set(gen, n, 2);
      for (const Geometry* g : {static_cast<const Geometry*>(&bw_geometry()), static_cast<const Geometry*>(&ai_geometry())}) {
        const SymMatrix want = g->pair_mean(ab[0], ab[1]);
        for (Algorithm algo : kAll) {
          const BarycenterResult r = barycenter(algo, *g, ab, cfg);
          CHECK(r.converged);
          CHECK(g->distance(r.mean, want) <= std::max(cfg.epsilon, 1e-5));
        }
      }
    }
  }

  TEST_CASE("commuting inputs recover the closed form") {
    Gen gen(4);
    const SolverConfig cfg;
    for (int m : {3, 5, 10}) {
      for (int n : {1, 5, 10}) {
        std::vector<SymMatrix> xs;
        Vector root_mean = Vector::Zero(n);
        for (int k = 0; k < m; ++k) {
          const Vector d = gen.positive_vector(n, 0.01, 3.0);
          xs.push_back(SymMatrix::diagonal(d));
          root_mean += d.cwiseSqrt() / m;
        }
        const Matrix want = root_mean.cwiseAbs2().asDiagonal();
        for (Algorithm algo : kAll) {
          const BarycenterResult r = barycenter(algo, bw_geometry(), xs, cfg);
          CHECK(r.converged);
          CHECK((r.mean.matrix() - want).norm() <= std::max(cfg.epsilon, 1e-4));
        }
      }
    }
  }

  TEST_CASE("projection output is stationary") {
    Gen gen(5);
    const SolverConfig cfg;
    for (int trial = 0; trial < 10; ++trial) {
      const std::vector<SymMatrix> xs = spd_set(gen, gen.integer(2, 10), gen.integer(3, 12));
      for (const Geometry* g : {static_cast<const Geometry*>(&bw_geometry()), static_cast<const Geometry*>(&ai_geometry())}) {
        const BarycenterResult r = projection_mean(*g, xs, cfg);
        CHECK(r.converged);
        CHECK(g->mean_log(r.mean, xs).value.frobenius_norm() <= 10.0 * cfg.epsilon);
      }
    }
  }

  TEST_CASE("permutation robustness") {
    Gen gen(6);
    const SolverConfig cfg;
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<SymMatrix> xs = spd_set(gen, 6, 7);
      const BarycenterResult p0 = projection_mean(bw_geometry(), xs, cfg);
      const BarycenterResult c0 = cheap_mean(bw_geometry(), xs, cfg);
      const BarycenterResult i0 = inductive_mean(bw_geometry(), xs, cfg);
      std::reverse(xs.begin(), xs.end());
      std::rotate(xs.begin(), xs.begin() + 2, xs.end());
      CHECK(bw_distance(projection_mean(bw_geometry(), xs, cfg).mean, p0.mean) <= 1e-6);
      CHECK(bw_distance(cheap_mean(bw_geometry(), xs, cfg).mean, c0.mean) <= 1e-6);
      CHECK(bw_distance(inductive_mean(bw_geometry(), xs, cfg).mean, i0.mean) <= 10.0 * cfg.epsilon);
    }
  }

  TEST_CASE("orthogonal equivariance") {
    Gen gen(7);
    for (int trial = 0; trial < 5; ++trial) {
      const int n = gen.integer(2, 8);
      const std::vector<SymMatrix> xs = spd_set(gen, n, 5);
      const Matrix q = gen.orthogonal(n);
      std::vector<SymMatrix> qxs;
      for (const SymMatrix& x : xs) qxs.push_back(conjugate(q, x));
      for (Algorithm algo : kAll) {
        const SymMatrix m = barycenter(algo, bw_geometry(), xs).mean;
        const SymMatrix qm = barycenter(algo, bw_geometry(), qxs).mean;
        CHECK(frobenius_dist(qm, conjugate(q, m)) <= 1e-5);
      }
    }
  }

  TEST_CASE("shared null space is deflated") {
    Gen gen(8);
    const int n = 4;
    std::vector<SymMatrix> small;
    std::vector<SymMatrix> padded;
    for (int k = 0; k < 4; ++k) {
      const SymMatrix a = gen.spd(n);
      small.push_back(a);
      Matrix big = Matrix::Zero(n + 2, n + 2);
      big.block(1, 1, n, n) = a.matrix();
      padded.push_back(SymMatrix(big));
    }
    for (Algorithm algo : {Algorithm::Projection, Algorithm::Cheap}) {
      const BarycenterResult r = barycenter(algo, bw_geometry(), padded);
      CHECK(r.converged);
      const SymMatrix want = barycenter(algo, bw_geometry(), small).mean;
      CHECK((r.mean.matrix().block(1, 1, n, n) - want.matrix()).norm() <= 1e-8);
      CHECK(r.mean.matrix().row(0).norm() <= 1e-12);
      CHECK(r.mean.matrix().row(n + 1).norm() <= 1e-12);
    }
  }

  TEST_CASE("non-convergence is reported, not thrown") {
    Gen gen(9);
    const std::vector<SymMatrix> xs = spd_set(gen, 5, 6);
    SolverConfig cfg;
    cfg.epsilon = 1e-12;
    cfg.max_iters = 2;
    for (Algorithm algo : kAll) {
      const BarycenterResult r = barycenter(algo, bw_geometry(), xs, cfg);
      CHECK_FALSE(r.converged);
      CHECK(r.iterations <= 2);
      CHECK(r.diagnostic.empty());
    }
    // Inputs with disjoint supports put a singular matrix into AI log.
    const std::vector<double> e1{1.0, 0.0};
    const std::vector<double> e2{0.0, 1.0};
    const std::vector<SymMatrix> disjoint{SymMatrix::diagonal(e1), SymMatrix::diagonal(e2)};
    const BarycenterResult r = projection_mean(ai_geometry(), disjoint);
    CHECK_FALSE(r.converged);
    CHECK_FALSE(r.diagnostic.empty());
  }

  TEST_CASE("converged results respect the step bound") {
    Gen gen(10);
    const std::vector<SymMatrix> xs = spd_set(gen, 4, 5);
    const SolverConfig cfg;
    for (Algorithm algo : kAll) {
      const BarycenterResult r = barycenter(algo, bw_geometry(), xs, cfg);
      CHECK(r.converged);
      CHECK(r.final_step <= cfg.epsilon);
      CHECK(r.iterations <= cfg.iteration_cap(algo));
      CHECK(r.algorithm == algo);
      CHECK(r.geometry == "bw");
    }
    const BarycenterResult c = cheap_mean(bw_geometry(), xs, cfg);
    REQUIRE(c.working_set_spread.has_value());
    CHECK(*c.working_set_spread >= 0.0);
  }

  TEST_CASE("invalid inputs") {
    const std::vector<SymMatrix> none;
    CHECK_THROWS_AS(inductive_mean(bw_geometry(), none), InvalidArgument);
    const std::vector<SymMatrix> mixed{SymMatrix::identity(2), SymMatrix::identity(3)};
    CHECK_THROWS_AS(projection_mean(bw_geometry(), mixed), DimensionMismatch);
    SolverConfig bad;
    bad.epsilon = 0.0;
    const std::vector<SymMatrix> one{SymMatrix::identity(2)};
    CHECK_THROWS_AS(cheap_mean(bw_geometry(), one, bad), InvalidArgument);
    bad.epsilon = 1e-3;
    bad.max_iters = 0;
    CHECK_THROWS_AS(cheap_mean(bw_geometry(), one, bad), InvalidArgument);
    CHECK(algorithm_from_string("cheap") == Algorithm::Cheap);
    CHECK_THROWS_AS(algorithm_from_string("fast"), InvalidArgument);
  }

  TEST_CASE("ssd and variance") {
    const std::vector<SymMatrix> xs{scalar(1.0), scalar(9.0)};
    CHECK(ssd(bw_geometry(), xs, scalar(4.0)) == doctest::Approx(2.0));
    CHECK(frechet_variance(bw_geometry(), xs, scalar(4.0)) == doctest::Approx(1.0));
    const std::vector<SymMatrix> one{scalar(3.0)};
    CHECK(ssd(bw_geometry(), one, scalar(3.0)) == 0.0);

    const std::vector<SymMatrix> three{scalar(1.0), scalar(4.0), scalar(16.0)};
    const double best = ssd(bw_geometry(), three, scalar(49.0 / 9.0));
    for (double delta : {-0.1, 0.1}) CHECK(best <= ssd(bw_geometry(), three, scalar(49.0 / 9.0 + delta)));

    Gen gen(11);
    const std::vector<SymMatrix> rnd = spd_set(gen, 4, 6);
    const SymMatrix m = gen.spd(4);
    CHECK(frechet_variance(bw_geometry(), rnd, m) == doctest::Approx(ssd(bw_geometry(), rnd, m) / 6.0));
    const std::vector<SymMatrix> none;
    CHECK_THROWS_AS(frechet_variance(bw_geometry(), none, m), InvalidArgument);
  }
}
