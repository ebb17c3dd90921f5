#include <cmath>
#include <vector>

#include "doctest.h"
#include "plpot/ballsum.hpp"
#include "plpot/calculus.hpp"
#include "plpot/potentials.hpp"
#include "test_support.hpp"

using namespace plpot;

namespace {

Point mid_point(const Grid& g) {
  Index c{g.shape()[0] / 2, g.shape()[1] / 2, g.dim() == 3 ? g.shape()[2] / 2 : 0};
  return g.point(c);
}

}  // namespace

TEST_CASE("constant field reproduces the linear-in-R closed form") {
  // |V| = c: the potential equals c sqrt(omega_n) R; the discrete counting
  // measure carries an O(h) lattice bias, so tolerances scale with h.
  SUBCASE("2d") {
    auto dom = testsup::unit_box(2, 129);
    ScalarField V(dom, 2.0);
    double R = 0.35;
    PotentialCurve c = p_potential(V, mid_point(dom->grid()), R);
    double expect = 2.0 * std::sqrt(unit_ball_volume(2)) * R;
    CHECK(c.value == doctest::Approx(expect).epsilon(2e-3));
    for (double g : c.integrand) CHECK(g >= 0.0);
  }
  SUBCASE("3d") {
    auto dom = testsup::unit_box(3, 33);
    ScalarField V(dom, 1.5);
    double R = 0.3;
    double val = p_potential_value(V, mid_point(dom->grid()), R);
    double expect = 1.5 * std::sqrt(unit_ball_volume(3)) * R;
    CHECK(val == doctest::Approx(expect).epsilon(5e-3));
  }
}

TEST_CASE("zero field, homogeneity, node refinement, radius monotonicity") {
  Rng rng(11);
  auto dom = testsup::unit_box(2, 33);
  Point x = mid_point(dom->grid());

  ScalarField zero(dom);
  CHECK(p_potential(zero, x, 0.4).value == 0.0);
  CHECK(p_potential_dyadic(zero, x, 0.4) == 0.0);

  ScalarField V = testsup::rough_field(dom, rng);
  ScalarField V3(dom);
  for (std::int64_t p : dom->members()) V3[p] = -3.0 * V[p];

  double a = p_potential(V, x, 0.4).value;
  double b = p_potential(V3, x, 0.4).value;
  CHECK(b == doctest::Approx(3.0 * a).epsilon(1e-14));

  // The integral is exact on the counting measure: sample density is output
  // resolution only.
  CHECK(p_potential(V, x, 0.4, 64).value == p_potential(V, x, 0.4, 128).value);

  double prev = 0.0;
  for (double R : {0.05, 0.1, 0.2, 0.3, 0.45}) {
    double v = p_potential_value(V, x, R);
    CHECK(v >= prev);
    prev = v;
  }

  CHECK_THROWS(p_potential(V, x, 0.0));
  CHECK_THROWS(p_potential(V, x, -1.0));
}

TEST_CASE("dyadic sum scaled by its constant stays below the doubled-radius potential") {
  SUBCASE("constant field both closed forms") {
    auto dom = testsup::unit_box(2, 65);
    ScalarField V(dom, 1.0);
    Point x = mid_point(dom->grid());
    double R = 0.2;
    double dy = p_potential_dyadic(V, x, R);
    double full = p_potential(V, x, 2.0 * R).value;
    CHECK(dy > 0.0);
    CHECK(dyadic_constant(2) * dy <= full * (1.0 + 1e-12));
    // Every dyadic term is close to c sqrt(omega_2) R_j, so the sum is close
    // to twice the R-term's geometric series.
    double series = 0.0;
    for (double Rj = R; Rj >= dom->grid().spacing(); Rj *= 0.5)
      series += std::sqrt(unit_ball_volume(2)) * Rj;
    CHECK(dy == doctest::Approx(series).epsilon(0.05));
  }
  SUBCASE("seeded rough fields") {
    for (int dim : {2, 3}) {
      int trials = dim == 2 ? 50 : 10;
      for (int t = 0; t < trials; ++t) {
        Rng rng(3000 + 17 * dim + t);
        auto dom = testsup::unit_box(dim, dim == 2 ? 17 : 9);
        ScalarField V = testsup::rough_field(dom, rng);
        Point x = mid_point(dom->grid());
        double R = rng.uniform(0.1, 0.4);
        double lhs = dyadic_constant(dim) * p_potential_dyadic(V, x, R);
        double rhs = p_potential(V, x, 2.0 * R).value;
        CHECK(lhs <= rhs * (1.0 + 1e-12));
      }
    }
  }
}

TEST_CASE("wolff potential: closed form, errors, linear-case double sum") {
  SUBCASE("constant field closed form") {
    auto dom = testsup::unit_box(2, 129);
    ScalarField V(dom, 1.3);
    double R = 0.3, beta = 0.5, p = 3.0;
    double val = wolff_potential(V, mid_point(dom->grid()), R, beta, p);
    double expo = beta * p / (p - 1.0);
    double expect = std::pow(1.3 * unit_ball_volume(2), 1.0 / (p - 1.0)) *
                    (p - 1.0) / (beta * p) * std::pow(R, expo);
    CHECK(val == doctest::Approx(expect).epsilon(3e-3));
  }
  SUBCASE("zero field and domain errors") {
    auto dom = testsup::unit_box(2, 17);
    ScalarField zero(dom);
    Point x = mid_point(dom->grid());
    CHECK(wolff_potential(zero, x, 0.3, 0.5, 3.0) == 0.0);
    CHECK_THROWS(wolff_potential(zero, x, 0.3, 0.7, 3.0));   // beta >= n/p
    CHECK_THROWS(wolff_potential(zero, x, 0.3, 0.667, 3.0)); // boundary ~ n/p
    CHECK_THROWS(wolff_potential(zero, x, -0.1, 0.5, 3.0));
  }
  SUBCASE("beta=1, p=2 matches the direct double sum") {
    Rng rng(777);
    auto dom = testsup::unit_box(3, 17);
    ScalarField V = testsup::rough_field(dom, rng);
    const Grid& g = dom->grid();
    Point x = mid_point(g);
    double R = 0.31, h = g.spacing(), h3 = g.cell_volume();

    double oracle = 0.0;
    for (std::int64_t p : dom->members()) {
      double d = dist(g.point(p), x, 3);
      if (d >= R) continue;
      oracle += std::fabs(V[p]) * h3 * (1.0 / std::max(d, h) - 1.0 / R);
    }
    Index cix = g.nearest(x);
    oracle += std::fabs(V[g.flat(cix)]) * unit_ball_volume(3) * h * h / 2.0;

    double val = wolff_potential(V, x, R, 1.0, 2.0);
    CHECK(val == doctest::Approx(oracle).epsilon(1e-12));
  }
}

TEST_CASE("fft ball masses equal the direct counting sums") {
  for (int dim : {2, 3}) {
    Rng rng(50 + dim);
    auto dom = testsup::unit_box(dim, dim == 2 ? 33 : 13);
    ScalarField V = testsup::rough_field(dom, rng);
    const Grid& g = dom->grid();
    double h = g.spacing(), hn = g.cell_volume();

    BallSums sums(V, 0.4);
    std::vector<double> m;
    for (double rho : {0.07, 0.15, 0.33}) {
      sums.masses(rho, m);
      // Direct sums at a handful of centers, including near the edge.
      std::vector<std::int64_t> probe = {dom->members().front(),
                                         dom->members()[dom->members().size() / 2],
                                         dom->members().back()};
      for (std::int64_t c : probe) {
        Index ci = g.unflat(c);
        double direct = 0.0;
        for (std::int64_t p : dom->members()) {
          Index pi = g.unflat(p);
          double q = 0.0;
          for (int k = 0; k < dim; ++k)
            q += double(pi[k] - ci[k]) * double(pi[k] - ci[k]);
          if (h * std::sqrt(q) < rho) direct += V[p] * hn;
        }
        CHECK(m[size_t(c)] == doctest::Approx(direct).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("ladder potential field tracks the exact per-center values") {
  Rng rng(99);
  auto dom = testsup::unit_box(2, 33);
  ScalarField V = testsup::rough_field(dom, rng);
  double R = 0.3;
  // The ladder resolves the counting measure only at its nodes, so the
  // worst-center relative error decays first order in the node density.
  struct Budget { int npd; double cap; };
  double prev_worst = 1.0;
  for (Budget bgt : {Budget{64, 8e-3}, Budget{128, 4e-3}, Budget{256, 2e-3}}) {
    ScalarField approx = p_potential_field(V, R, bgt.npd);
    double worst = 0.0, sum = 0.0;
    std::int64_t cnt = 0;
    for (std::int64_t p : dom->members()) {
      double exact = p_potential_value(V, dom->grid().point(p), R);
      if (exact > 1e-12) {
        double rel = std::fabs(approx[p] - exact) / exact;
        worst = std::max(worst, rel);
        sum += rel;
        ++cnt;
      }
    }
    CHECK(worst <= bgt.cap);
    CHECK(sum / double(cnt) <= 0.5 * bgt.cap);
    CHECK(worst <= prev_worst);
    prev_worst = worst;
  }
}

TEST_CASE("potential sup: closed form at a pinned center, monotone, exact max") {
  auto dom = testsup::unit_box(2, 65);
  const Grid& g = dom->grid();

  SUBCASE("zero field") {
    ScalarField zero(dom);
    CHECK(potential_sup(zero, 0.3) == 0.0);
  }
  SUBCASE("constant field, single-center region") {
    ScalarField V(dom, 1.0);
    Point x = mid_point(g);
    Ball region{x, 0.4 * g.spacing()};
    double val = potential_sup(V, 0.3, region);
    CHECK(val == doctest::Approx(std::sqrt(unit_ball_volume(2)) * 0.3).epsilon(2e-3));
  }
  SUBCASE("monotone in R and equal to the explicit member loop") {
    Rng rng(5);
    auto small = testsup::unit_box(2, 17);
    ScalarField V = testsup::rough_field(small, rng);
    double s1 = potential_sup(V, 0.1), s2 = potential_sup(V, 0.2),
           s3 = potential_sup(V, 0.35);
    CHECK(s1 <= s2);
    CHECK(s2 <= s3);
    double direct = 0.0;
    for (std::int64_t p : small->members())
      direct = std::max(direct,
                        p_potential_value(V, small->grid().point(p), 0.2));
    CHECK(s2 == doctest::Approx(direct).epsilon(1e-14));
  }
}

TEST_CASE("translation equivariance under whole-cell shifts") {
  Rng rng(404);
  auto f = testsup::smooth_function(rng, 2);
  Grid g1 = testsup::unit_grid(2, 33);
  double h = g1.spacing();
  Grid g2(2, g1.shape(), h, {g1.origin()[0] + 5.0 * h, g1.origin()[1] + 2.0 * h, 0.0});

  auto d1 = make_box_domain(g1);
  auto d2 = make_box_domain(g2);
  ScalarField V1(d1), V2(d2);
  // Same sample values cell for cell; the pattern rides along with the shift.
  for (std::int64_t p : d1->members()) V1[p] = f(g1.point(p));
  for (std::int64_t p : d2->members()) {
    Index ix = g2.unflat(p);
    V2[p] = f(g1.point(ix));
  }
  Point x1 = mid_point(g1), x2 = mid_point(g2);
  CHECK(p_potential(V1, x1, 0.3).value ==
        doctest::Approx(p_potential(V2, x2, 0.3).value).epsilon(1e-12));
  CHECK(p_potential_dyadic(V1, x1, 0.3) ==
        doctest::Approx(p_potential_dyadic(V2, x2, 0.3)).epsilon(1e-12));
}

TEST_CASE("potential against rearrangement bounds in three dimensions") {
  SUBCASE("zero field") {
    auto dom = testsup::unit_box(3, 9);
    ScalarField zero(dom);
    LorentzBoundReport rep = lorentz_bound_check(zero, 0.3);
    CHECK(rep.sup_potential == 0.0);
    CHECK(rep.hunt_integral == 0.0);
    CHECK(rep.v_lorentz_norm == 0.0);
  }
  SUBCASE("indicator field: everything finite and ordered") {
    auto dom = testsup::unit_box(3, 17);
    const Grid& g = dom->grid();
    ScalarField V(dom);
    for (std::int64_t p : dom->members()) {
      Point x = g.point(p);
      if (dist(x, {0.5, 0.5, 0.5}, 3) < 0.25) V[p] = 2.0;
    }
    LorentzBoundReport rep = lorentz_bound_check(V, 0.3);
    CHECK(rep.sup_potential > 0.0);
    CHECK(rep.hunt_integral > 0.0);
    CHECK(rep.v_lorentz_norm > 0.0);
    CHECK(std::isfinite(rep.ratio_hunt));
    CHECK(std::isfinite(rep.ratio_norm));
  }
  SUBCASE("inverse square-root singularity across refinements") {
    // V(x) = |x|^(-1/2) lies in L(3,1); the sup/norm ratio must stay under a
    // fixed cap as the grid refines.
    for (int npts : {9, 17, 25}) {
      auto dom = testsup::unit_box(3, npts, 1e-3);
      ScalarField V(dom);
      V.fill_from([](const Point& x) {
        return 1.0 / std::sqrt(std::sqrt(dot(x, x, 3)));
      });
      LorentzBoundReport rep = lorentz_bound_check(V, 0.25);
      CHECK(rep.sup_potential > 0.0);
      CHECK(rep.ratio_norm <= 3.0);
      CHECK(rep.ratio_hunt <= 3.0);
    }
  }
}
