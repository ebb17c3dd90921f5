// Acceptance drill for the laboratory: thirteen end-to-end properties, each
// verified against an independent oracle or a frozen cap and reported as a
// single [PASS]/[FAIL] line. The binary exits nonzero when any line fails,
// so the suite gates the build like any other test.
//
// Tolerances are pinned here, next to the check they guard, together with
// the margin observed when they were frozen. Grid sizes are the smallest
// that meet each tolerance: the closed-form potential checks use a fine
// geometry-only grid (no PDE solve) because the counting-measure bias decays
// like the spacing, while every solver-backed check runs on desk-scale grids.
#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "plpot/calculus.hpp"
#include "plpot/estimates.hpp"
#include "plpot/field.hpp"
#include "plpot/lorentz.hpp"
#include "plpot/model.hpp"
#include "plpot/potentials.hpp"
#include "plpot/rng.hpp"
#include "plpot/solver.hpp"

using namespace plpot;

namespace {

// ---------------------------------------------------------------------------
// harness

struct Harness {
  int failures = 0;
  int index = 0;

  void report(bool ok, const char* title, const std::string& detail) {
    ++index;
    std::printf("[%s] %2d. %s — %s\n", ok ? "PASS" : "FAIL", index, title,
                detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }

  void run(const char* title, const std::function<bool(std::string&)>& body) {
    std::string detail;
    bool ok = false;
    try {
      ok = body(detail);
    } catch (const std::exception& e) {
      ok = false;
      detail = std::string("exception: ") + e.what();
    }
    report(ok, title, detail);
  }
};

std::string fmt(const char* f, ...) {
  char buf[256];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

// ---------------------------------------------------------------------------
// shared fixtures

Grid unit_grid(int dim, int npts, double lo = 0.0) {
  return Grid(dim, Index{npts, npts, dim == 3 ? npts : 1}, 1.0 / (npts - 1),
              Point{lo, lo, dim == 3 ? lo : 0.0});
}

DomainPtr unit_box(int dim, int npts, double lo = 0.0) {
  return make_box_domain(unit_grid(dim, npts, lo));
}

Point mid(const Grid& g) {
  Point c{0, 0, 0};
  for (int k = 0; k < g.dim(); ++k) c[k] = g.origin()[k] + 0.5 * g.length(k);
  return c;
}

// iid values with deliberate zero and tied atoms: exercises run merging in
// the rearrangement and ties in every norm.
ScalarField rough_field(const DomainPtr& dom, Rng& rng) {
  ScalarField f(dom);
  for (std::int64_t p : dom->members()) {
    const double u = rng.uniform();
    if (u < 0.15)
      f[p] = 0.0;
    else if (u < 0.3)
      f[p] = 2.5;
    else
      f[p] = std::abs(rng.normal()) + 0.1;
  }
  return f;
}

// seeded smooth function of the continuous coordinate, so samples on finer
// grids approximate the same object
std::function<double(const Point&)> smooth_function(Rng& rng, int dim) {
  struct Mode {
    double c, kx, ky, kz, phase;
  };
  std::vector<Mode> ms;
  for (int m = 0; m < 4; ++m)
    ms.push_back({rng.uniform(0.3, 1.0), double(rng.uniform_int(1, 3)),
                  double(rng.uniform_int(1, 3)),
                  dim == 3 ? double(rng.uniform_int(1, 3)) : 0.0,
                  rng.uniform(0.0, 6.28)});
  return [ms](const Point& x) {
    double s = 0.0;
    for (const auto& m : ms)
      s += m.c * std::cos(3.14159265358979 *
                              (m.kx * x[0] + m.ky * x[1] + m.kz * x[2]) +
                          m.phase);
    return std::abs(s) + 0.05;
  };
}

// the quadratic family u = |x|^2/2 on [0.3, 1.3]^2 with its matching source,
// solved once per (p, npts) and shared by several criteria
struct Solved {
  DomainPtr dom;
  Model model;
  VectorField u;
  SolveReport rep;
  double sup_err = 0.0;
};

const Solved& manufactured(double p, int npts) {
  static std::map<std::pair<int, int>, Solved> cache;
  const auto key = std::make_pair(int(p * 100), npts);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  Grid g(2, Index{npts, npts, 1}, 1.0 / (npts - 1), Point{0.3, 0.3, 0.0});
  auto dom = make_box_domain(g);
  Model m = Model::p_laplace(2, 1, p, 1e-4);
  VectorField bd(dom, 1, 1);
  bd.fill_from([](const Point& x, double* out) {
    out[0] = 0.5 * (x[0] * x[0] + x[1] * x[1]);
  });
  VectorField f(dom, 1, 1);
  f.fill_from([p](const Point& x, double* out) {
    const double r = std::sqrt(x[0] * x[0] + x[1] * x[1]);
    out[0] = -p * std::pow(r, p - 2.0);
  });
  DirichletProblem prob{m, dom, bd, VectorField(dom, 1, 1), BSpec{}};
  auto [u, rep] = solve_dirichlet(prob, f);
  double err = 0.0;
  for (std::int64_t pt : dom->members()) {
    const Point x = g.point(pt);
    err = std::max(err, std::fabs(u.at(pt, 0, 0) -
                                  0.5 * (x[0] * x[0] + x[1] * x[1])));
  }
  Solved s{dom, m, std::move(u), std::move(rep), err};
  return cache.emplace(key, std::move(s)).first->second;
}

const Ball kBall{{0.8, 0.8, 0.0}, 0.4};

// datum catalog used by the driven solves: constant, seeded lognormal noise,
// and an off-center integrable singularity
ScalarField catalog_V(const DomainPtr& dom, int which, unsigned seed) {
  const Grid& g = dom->grid();
  ScalarField V(dom);
  if (which == 0) {
    for (std::int64_t p : dom->members()) V[p] = 0.3;
  } else if (which == 1) {
    Rng rng(seed);
    for (std::int64_t p : dom->members()) V[p] = 0.3 * rng.lognormal(0.4);
  } else {
    Point c = mid(g);
    c[0] += g.spacing() / 3.0;
    for (std::int64_t p : dom->members()) {
      double d = std::max(dist(g.point(p), c, g.dim()), g.spacing() / 2);
      V[p] = 0.4 * std::pow(d, -0.5);
    }
  }
  return V;
}

// ---------------------------------------------------------------------------
// 1. rearrangement exactness

bool crit_rearrangement(std::string& detail) {
  const double kLayerCakeTol = 1e-8;  // observed worst gap 1.4e-14
  int mismatches = 0;
  double worst_gap = 0.0;
  for (int s = 0; s < 100; ++s) {
    Rng rng(31000 + s);
    const int dim = (s % 4 == 3) ? 3 : 2;
    auto dom = unit_box(dim, dim == 3 ? 13 : 29);
    ScalarField f = rough_field(dom, rng);
    RearrangementProfile mu = rearrange(f);
    const double cell = dom->grid().cell_volume();

    // Run lengths are cell * (integer count); the integer is recovered
    // exactly, so superlevel measures can be compared as integers with no
    // floating-point slack at all.
    std::vector<long long> cnt(mu.measure.size());
    for (size_t r = 0; r < mu.measure.size(); ++r)
      cnt[r] = std::llround(mu.measure[r] / cell);

    std::vector<double> levels = mu.level;
    levels.push_back(0.0);
    for (size_t r = 0; r + 1 < mu.level.size(); ++r)
      levels.push_back(0.5 * (mu.level[r] + mu.level[r + 1]));
    for (double t : levels) {
      long long direct = 0;
      for (std::int64_t p : dom->members())
        if (std::fabs(f[p]) > t) ++direct;
      long long prof = 0;
      for (size_t r = 0; r < mu.level.size() && mu.level[r] > t; ++r)
        prof += cnt[r];
      if (direct != prof) ++mismatches;
    }

    for (double gm : {2.0, 3.0})
      for (double q : {0.5, 1.0, 2.0}) {
        double a = lorentz_quasinorm(mu, gm, q);
        double b = lorentz_quasinorm_layercake(mu, gm, q);
        worst_gap = std::max(worst_gap, std::fabs(a - b) / a);
      }
  }
  detail = fmt("100 seeded fields: %d level mismatches; "
               "worst layer-cake gap %.2e (tol %.0e)",
               mismatches, worst_gap, kLayerCakeTol);
  return mismatches == 0 && worst_gap <= kLayerCakeTol;
}

// ---------------------------------------------------------------------------
// 2. Lorentz square identity

bool crit_square_identity(std::string& detail) {
  const double kSeededTol = 1e-8;
  const double kExactTol = 1e-13;  // indicator forms agree to a few ulp
  double worst_seeded = 0.0;
  for (int s = 0; s < 40; ++s) {
    Rng rng(52000 + s);
    const int dim = (s % 3 == 2) ? 3 : 2;
    auto dom = unit_box(dim, dim == 3 ? 13 : 29);
    ScalarField f = rough_field(dom, rng);
    if (s % 2 == 1)
      for (std::int64_t p : dom->members()) f[p] *= 0.4 * rng.lognormal(0.5);
    auto repi = square_identity_check(f, 3);
    worst_seeded = std::max(worst_seeded, repi.rel_gap);
  }

  // indicators a * 1_E: quasinorm a |E|^(1/3), squared identity a^2 |E|^(2/3)
  double worst_exact = 0.0;
  auto dom = unit_box(2, 33);
  const Grid& g = dom->grid();
  for (double a : {0.7, 2.5}) {
    for (double r : {0.12, 0.27, 10.0}) {  // 10: the whole box
      ScalarField f(dom);
      long long count = 0;
      for (std::int64_t p : dom->members())
        if (dist(g.point(p), mid(g), 2) < r) {
          f[p] = a;
          ++count;
        }
      const double m = double(count) * g.cell_volume();
      const double quasi = lorentz_quasinorm(rearrange(f), 3.0, 1.0);
      const double closed = a * std::pow(m, 1.0 / 3.0);
      worst_exact =
          std::max(worst_exact, std::fabs(quasi - closed) / closed);
      auto repi = square_identity_check(f, 3);
      const double closed2 = closed * closed;
      worst_exact =
          std::max(worst_exact, std::fabs(repi.lhs - closed2) / closed2);
      worst_exact =
          std::max(worst_exact, std::fabs(repi.rhs - closed2) / closed2);
    }
  }
  detail = fmt("40 seeded fields worst gap %.2e (tol %.0e); "
               "indicator closed forms off by %.2e (tol %.0e)",
               worst_seeded, kSeededTol, worst_exact, kExactTol);
  return worst_seeded <= kSeededTol && worst_exact <= kExactTol;
}

// ---------------------------------------------------------------------------
// 3. quasinorm-vs-norm equivalence

bool crit_hunt(std::string& detail) {
  const double kStability = 0.10;
  std::vector<double> max_ratio;
  bool ordered = true;
  for (int npts : {33, 65, 129}) {
    double worst = 0.0;
    auto dom = unit_box(2, npts);
    const Grid& g = dom->grid();
    for (int s = 0; s < 30; ++s) {
      Rng rng(5000 + s);
      auto fn = smooth_function(rng, 2);
      ScalarField f(dom);
      for (std::int64_t p : dom->members()) f[p] = fn(g.point(p));
      RearrangementProfile mu = rearrange(f);
      for (double gm : {2.0, 3.0})
        for (double q : {1.0, 2.0}) {
          const double quasi = lorentz_quasinorm(mu, gm, q);
          const double norm = lorentz_norm(mu, gm, q);
          if (!(quasi <= norm * (1.0 + 1e-12))) ordered = false;
          worst = std::max(worst, norm / quasi);
        }
    }
    max_ratio.push_back(worst);
  }
  bool finite = std::isfinite(max_ratio[0] + max_ratio[1] + max_ratio[2]);
  bool stable = true;
  for (size_t i = 1; i < max_ratio.size(); ++i)
    if (std::fabs(max_ratio[i] / max_ratio[i - 1] - 1.0) > kStability)
      stable = false;
  detail = fmt("30 fields x {2,3}x{1,2}: quasinorm <= norm everywhere %s; "
               "max ratio %.4f / %.4f / %.4f at 33/65/129 (drift tol 10%%)",
               ordered ? "held" : "VIOLATED", max_ratio[0], max_ratio[1],
               max_ratio[2]);
  return ordered && finite && stable;
}

// ---------------------------------------------------------------------------
// 4. potential closed forms and the dyadic lower bound

bool crit_potentials(std::string& detail) {
  const double kTol = 1e-4;
  // geometry-only evaluations: the counting-measure bias decays like the
  // grid spacing, and this grid leaves a 2.5x margin under the tolerance
  auto dom = unit_box(2, 2049);
  const Point x = mid(dom->grid());

  ScalarField V2(dom, 2.0);
  const double R = 0.35;
  const double pval = p_potential_value(V2, x, R);
  const double pref = 2.0 * std::sqrt(unit_ball_volume(2)) * R;
  const double prel = std::fabs(pval - pref) / pref;

  ScalarField V13(dom, 1.3);
  auto wolff_rel = [&](double beta, double p, double r) {
    const double val = wolff_potential(V13, x, r, beta, p);
    const double ref = std::pow(1.3 * unit_ball_volume(2), 1.0 / (p - 1.0)) *
                       (p - 1.0) / (beta * p) *
                       std::pow(r, beta * p / (p - 1.0));
    return std::fabs(val - ref) / ref;
  };
  const double wrel_nl = wolff_rel(0.6, 1.5, 0.3);   // mass enters squared
  const double wrel_ln = wolff_rel(0.9, 2.0, 0.45);  // mass enters linearly

  int dyadic_fail = 0;
  for (int t = 0; t < 50; ++t) {
    const int dim = t < 40 ? 2 : 3;
    Rng rng(7600 + t);
    auto d = unit_box(dim, dim == 2 ? 33 : 17);
    ScalarField f = rough_field(d, rng);
    const Point c = mid(d->grid());
    const double r = dim == 2 ? 0.2 : 0.15;
    const double lower = dyadic_constant(dim) * p_potential_dyadic(f, c, r);
    const double full = p_potential_value(f, c, 2.0 * r);
    if (!(lower <= full * (1.0 + 1e-12))) ++dyadic_fail;
  }

  detail = fmt("linear-in-R form off %.1e, nonlinear/linear-mass wolff off "
               "%.1e/%.1e (tol 1e-4); dyadic lower bound failed on %d/50 fields",
               prel, wrel_nl, wrel_ln, dyadic_fail);
  return prel <= kTol && wrel_nl <= kTol && wrel_ln <= kTol &&
         dyadic_fail == 0;
}

// ---------------------------------------------------------------------------
// 5. manufactured convergence

bool crit_convergence(std::string& detail) {
  const double kExactFloor = 1e-12;  // below this the scheme is bit-exact
  const double kOrderFloor = 1.0;
  const int grids[] = {17, 33, 65, 129};
  bool ok = true;
  std::string per_p;
  for (double p : {1.5, 2.0, 3.0, 4.0}) {
    std::vector<double> errs;
    for (int npts : grids) {
      const Solved& s = manufactured(p, npts);
      if (!s.rep.converged) ok = false;
      errs.push_back(s.sup_err);
    }
    double min_order = 1e9;
    for (size_t i = 0; i + 1 < errs.size(); ++i) {
      if (errs[i + 1] > errs[i] * (1.0 + 1e-12)) ok = false;  // monotone
      if (errs[i + 1] > kExactFloor)
        min_order = std::min(min_order, std::log2(errs[i] / errs[i + 1]));
    }
    const bool exact = errs.back() <= kExactFloor;
    if (!exact && min_order < kOrderFloor) ok = false;
    if (!per_p.empty()) per_p += ", ";
    per_p += exact ? fmt("p=%.1f exact", p)
                   : fmt("p=%.1f order %.2f", p, min_order);
  }

  // p = 2 with affine boundary data and no source is reproduced exactly
  auto dom = unit_box(2, 33);
  VectorField bd(dom, 1, 1);
  bd.fill_from([](const Point& x, double* out) {
    out[0] = 0.7 * x[0] - 0.4 * x[1] + 0.2;
  });
  DirichletProblem prob{Model::p_laplace(2, 1, 2.0, 1e-4), dom, bd,
                        VectorField(dom, 1, 1), BSpec{}};
  auto [u, rep] = solve_dirichlet(prob, VectorField(dom, 1, 1));
  double lin_err = 0.0;
  for (std::int64_t pt : dom->members()) {
    const Point x = dom->grid().point(pt);
    lin_err = std::max(lin_err, std::fabs(u.at(pt, 0, 0) -
                                          (0.7 * x[0] - 0.4 * x[1] + 0.2)));
  }
  if (!(rep.converged && lin_err <= 1e-10)) ok = false;

  detail = per_p + fmt(" over 17..129 (order floor 1.0); affine case off "
                       "%.1e (tol 1e-10)",
                       lin_err);
  return ok;
}

// ---------------------------------------------------------------------------
// 6. energy monotonicity

// Audits one inner solve: the recorded trace has one entry per accepted
// step plus the seed, and no accepted step may raise the energy.
bool audit_trace(const SolveReport& rep, long long& steps) {
  if (rep.energy_trace.size() != size_t(rep.newton_iterations) + 1)
    return false;
  for (size_t i = 1; i < rep.energy_trace.size(); ++i)
    if (rep.energy_trace[i] > rep.energy_trace[i - 1]) return false;
  if (rep.newton_iterations > 0 &&
      !(rep.energy_trace.back() <= rep.energy_trace.front()))
    return false;
  steps += rep.newton_iterations;
  return true;
}

bool crit_energy_monotone(std::string& detail) {
  long long steps = 0;
  int solves = 0, bad = 0;

  // the quadratic family across every growth exponent and refinement
  for (double p : {1.5, 2.0, 3.0, 4.0})
    for (int npts : {17, 33, 65, 129}) {
      const Solved& s = manufactured(p, npts);
      ++solves;
      if (!s.rep.converged || !audit_trace(s.rep, steps)) ++bad;
    }

  // datum-driven chains: the outer update is applied by hand so every inner
  // solve is audited individually
  for (double p : {2.0, 3.0})
    for (double frac : {0.25, 0.5}) {
      const double q = frac * (p - 1.0);
      Grid g(2, Index{33, 33, 1}, 1.0 / 32, Point{0.3, 0.3, 0.0});
      auto dom = make_box_domain(g);
      Model m = Model::p_laplace(2, 1, p, 1e-3);
      VectorField bd(dom, 1, 1);
      bd.fill_from([](const Point& x, double* out) {
        out[0] = 0.5 * (x[0] * x[0] + x[1] * x[1]);
      });
      ScalarField Vs = catalog_V(dom, 1, 901);
      const BSpec b{BKind::power, q, 1.0};
      DirichletProblem prob{m, dom, bd, VectorField(dom, 1, 1), BSpec{}};
      VectorField u = bd;
      for (int it = 0; it < 6; ++it) {
        VectorField Du = gradient(u);
        VectorField f(dom, 1, 1);
        for (std::int64_t pt : dom->members()) {
          double g2 = 0.0;
          for (int k = 0; k < 2; ++k) g2 += Du.at(pt, 0, k) * Du.at(pt, 0, k);
          f.at(pt, 0, 0) = b_formula(b, std::sqrt(g2)) * Vs[pt];
        }
        auto [next, rep] = solve_dirichlet(prob, f, {}, &u);
        ++solves;
        if (!rep.converged || !audit_trace(rep, steps)) ++bad;
        u = std::move(next);
      }
    }

  detail = fmt("%lld accepted steps across %d inner solves audited, "
               "%d energy increases",
               steps, solves, bad);
  return bad == 0 && steps > 0;
}

// ---------------------------------------------------------------------------
// 7. gradient bound under one frozen cap

bool crit_gradient_bound(std::string& detail) {
  const double kCap = 1.5;        // frozen; family observed <= 1.15
  const double kLinearCap = 1.1;  // affine solution sits at ~1
  double worst = 0.0;
  bool ok = true;
  for (double p : {1.5, 2.0, 3.0, 4.0})
    for (int npts : {17, 33, 65}) {
      const Solved& s = manufactured(p, npts);
      ScalarField zero(s.dom);
      auto rep = check_gradient_bound(s.u, s.model, zero, kBall,
                                      GradientBoundVariant::potential, kCap);
      if (!rep.passed || rep.rhs_terms[1].second != 0.0) ok = false;
      worst = std::max(worst, rep.empirical_constant);
    }

  // affine boundary, no datum: the bound is near-sharp with constant ~ 1
  auto dom = unit_box(2, 33);
  VectorField bd(dom, 1, 1);
  bd.fill_from([](const Point& x, double* out) {
    out[0] = 0.7 * x[0] - 0.4 * x[1];
  });
  Model m2 = Model::p_laplace(2, 1, 2.0, 1e-4);
  DirichletProblem prob{m2, dom, bd, VectorField(dom, 1, 1), BSpec{}};
  auto [u, srep] = solve_dirichlet(prob, VectorField(dom, 1, 1));
  ScalarField zero(dom);
  auto lin = check_gradient_bound(u, m2, zero, Ball{{0.5, 0.5, 0.0}, 0.3},
                                  GradientBoundVariant::potential, kLinearCap);
  if (!(srep.converged && lin.passed && lin.empirical_constant > 0.9)) ok = false;

  detail = fmt("family worst constant %.3f (cap %.1f) over p in "
               "{1.5,2,3,4} x three refinements; affine case %.5f (cap %.1f)",
               worst, kCap, lin.empirical_constant, kLinearCap);
  return ok;
}

// ---------------------------------------------------------------------------
// 8. level recursion at sampled centers

bool crit_degiorgi(std::string& detail) {
  const double kCap = 1.5;  // frozen; observed ~ 1.02
  const Solved& s = manufactured(3.0, 65);
  ScalarField v = bernstein_v(s.u, s.model);
  ScalarField tz(s.dom);
  ScalarField tc(s.dom);
  for (std::int64_t p : s.dom->members()) tc[p] = 0.5;

  Rng rng(424242);
  int monotone = 0, with_potential_not_larger = 0;
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    Point x{rng.uniform(0.55, 1.05), rng.uniform(0.55, 1.05), 0.0};
    auto res = degiorgi_iterate(v, tz, x, 0.1, 0.5);
    bool mono = res.levels.size() >= 2;
    for (size_t j = 1; j < res.levels.size(); ++j)
      if (res.levels[j] < res.levels[j - 1]) mono = false;
    if (mono) ++monotone;
    worst = std::max(worst, res.empirical_constant);

    auto res2 = degiorgi_iterate(v, tc, x, 0.1, 0.5);
    if (res2.potential_term > 0.0 &&
        res2.empirical_constant <= res.empirical_constant + 1e-12)
      ++with_potential_not_larger;
  }
  detail = fmt("100 centers: levels nondecreasing %d%%, one global constant "
               "%.3f (cap %.1f), live potential term shrinks it at %d/100",
               monotone, worst, kCap, with_potential_not_larger);
  return monotone == 100 && worst > 0.0 && worst <= kCap &&
         with_potential_not_larger == 100;
}

// ---------------------------------------------------------------------------
// 9. truncation-energy and oscillation caps, rescaling invariance

bool crit_caccioppoli_oscillation(std::string& detail) {
  const double kCaccCap = 1.6;  // frozen; observed ~ 1.07
  const double kOscCap = 0.8;   // frozen; observed ~ 0.43
  const double kRescaleTol = 1e-8;
  bool ok = true;
  int cacc_levels = 0, osc_levels = 0;
  double worst_cacc = 0.0, worst_osc = 0.0;

  for (int npts : {17, 33, 65}) {
    const Solved& s = manufactured(2.0, npts);
    ScalarField v = bernstein_v(s.u, s.model);
    ScalarField tz(s.dom);
    const Grid& g = s.dom->grid();

    const double supv = sup_norm(v, kBall);
    for (int i = 0; i < 10; ++i) {
      auto rep = caccioppoli_check({v, tz, kBall, supv * i / 10.0}, kCaccCap);
      if (!rep.passed || !std::isfinite(rep.empirical_constant)) ok = false;
      worst_cacc = std::max(worst_cacc, rep.empirical_constant);
      ++cacc_levels;
    }

    const double suph = sup_norm(v, Ball{kBall.center, kBall.radius / 2});
    for (int i = 0; i < 10; ++i) {
      const double k = suph * (0.1 + 0.8 * i / 9.0);
      std::int64_t cnt = 0;
      double half_int = 0.0;
      for (std::int64_t pt : s.dom->members()) {
        if (dist(g.point(pt), kBall.center, 2) >= kBall.radius / 2) continue;
        if (v[pt] > k) {
          ++cnt;
          half_int += (v[pt] - k) * (v[pt] - k) * g.cell_volume();
        }
      }
      if (cnt == 0) continue;
      const double d =
          0.9 * std::sqrt(half_int / (double(cnt) * g.cell_volume()));
      auto rep = oscillation_check({v, tz, kBall, k}, d, sobolev_chi(2), kOscCap);
      if (!rep.precondition_ok || !rep.passed) ok = false;
      worst_osc = std::max(worst_osc, rep.empirical_constant);
      ++osc_levels;
    }
  }

  // rescaling to the unit ball at unit scale leaves the constant unchanged
  const Solved& s = manufactured(2.0, 65);
  ScalarField v = bernstein_v(s.u, s.model);
  ScalarField tv(s.dom);
  for (std::int64_t p : s.dom->members()) tv[p] = 0.7;
  const Grid& g = s.dom->grid();
  const double R = kBall.radius;
  const double k = 0.4 * sup_norm(v, Ball{kBall.center, R / 2});
  std::int64_t cnt = 0;
  double half_int = 0.0;
  for (std::int64_t pt : s.dom->members()) {
    if (dist(g.point(pt), kBall.center, 2) >= R / 2) continue;
    if (v[pt] > k) {
      ++cnt;
      half_int += (v[pt] - k) * (v[pt] - k) * g.cell_volume();
    }
  }
  double rescale_gap = 1.0;
  if (cnt > 0) {
    const double d =
        0.9 * std::sqrt(half_int / (double(cnt) * g.cell_volume()));
    auto r1 = oscillation_check({v, tv, kBall, k}, d, sobolev_chi(2), kOscCap);
    Grid g2(2, g.shape(), g.spacing() / R,
            Point{(g.origin()[0] - kBall.center[0]) / R,
                  (g.origin()[1] - kBall.center[1]) / R, 0.0});
    auto dom2 = make_box_domain(g2);
    ScalarField w(dom2), W(dom2);
    for (std::int64_t pt : s.dom->members()) {
      w[pt] = v[pt] / d;
      W[pt] = R * tv[pt] / d;
    }
    auto r2 = oscillation_check({w, W, Ball{{0.0, 0.0, 0.0}, 1.0}, k / d}, 1.0,
                                sobolev_chi(2), kOscCap);
    if (!r1.precondition_ok || !r2.precondition_ok || !r1.passed) ok = false;
    rescale_gap = std::fabs(r1.empirical_constant - r2.empirical_constant) /
                  r1.empirical_constant;
  } else {
    ok = false;
  }
  if (rescale_gap > kRescaleTol) ok = false;

  detail = fmt("energy constant %.3f (cap %.1f) over %d levels, oscillation "
               "%.3f (cap %.1f) over %d levels; rescaling moved the constant "
               "by %.1e (tol 1e-8)",
               worst_cacc, kCaccCap, cacc_levels, worst_osc, kOscCap,
               osc_levels, rescale_gap);
  return ok && cacc_levels == 30 && osc_levels > 0;
}

// ---------------------------------------------------------------------------
// 10. critical-growth dichotomy

bool crit_critical_dichotomy(std::string& detail) {
  auto dom = unit_box(2, 33);
  Model base = Model::uhlenbeck(2, 1, 2.0, GrowthLaw::power);
  VectorField bd(dom, 1, 1);
  bd.fill_from([](const Point& x, double* out) { out[0] = x[0]; });
  const SolverOptions opt{};  // smallness thresholds at their defaults

  auto run = [&](double amp) {
    VectorField V(dom, 1, 1);
    for (std::int64_t pt : dom->members()) V.at(pt, 0, 0) = amp;
    DirichletProblem prob{base, dom, bd, V, BSpec{BKind::plain_power, 1.0, 0.0}};
    return fixed_point_solve(prob, opt).second;
  };

  const SolveReport small = run(0.05);
  const SolveReport large = run(5.0);  // 100x the small amplitude

  const bool small_ok = small.converged && !small.diverged &&
                        small.contraction_factor > 0.0 &&
                        small.contraction_factor < 1.0 &&
                        small.critical_label == "critical-small";
  const bool large_ok = !large.converged &&
                        (large.diverged ||
                         large.picard_iterations >= opt.max_picard);

  detail = fmt("amp 0.05: %s, contraction %.2e, label %s; amp 5 (100x): %s "
               "after %d outer iterations",
               small.converged ? "converged" : "NOT converged",
               small.contraction_factor, small.critical_label.c_str(),
               large.diverged ? "divergence detected"
               : large.converged ? "CONVERGED (unexpected)"
                                 : "iteration budget exhausted",
               large.picard_iterations);
  return small_ok && large_ok;
}

// ---------------------------------------------------------------------------
// 11. subcritical gradient bound on the datum catalog

bool crit_subcritical(std::string& detail) {
  const double kCap = 1.0;  // frozen; catalog observed <= 0.54
  double worst = 0.0;
  int cells = 0, failed = 0;
  for (double p : {2.0, 3.0})
    for (double frac : {0.25, 0.5}) {
      const double q = frac * (p - 1.0);
      for (int which : {0, 1, 2}) {
        Grid g(2, Index{33, 33, 1}, 1.0 / 32, Point{0.3, 0.3, 0.0});
        auto dom = make_box_domain(g);
        Model m = Model::p_laplace(2, 1, p, 1e-3);
        VectorField bd(dom, 1, 1);
        bd.fill_from([](const Point& x, double* out) {
          out[0] = 0.5 * (x[0] * x[0] + x[1] * x[1]);
        });
        ScalarField Vs = catalog_V(dom, which, 900 + unsigned(which) * 7);
        VectorField V(dom, 1, 1);
        for (std::int64_t pt : dom->members()) V.at(pt, 0, 0) = Vs[pt];
        DirichletProblem prob{m, dom, bd, V, BSpec{BKind::power, q, 1.0}};
        auto [u, rep] = fixed_point_solve(prob);
        auto est = check_gradient_bound(u, m, Vs, kBall,
                                        GradientBoundVariant::subcritical,
                                        kCap, 0.0, q, 1.0);
        ++cells;
        if (!rep.converged || !est.passed || est.rhs_terms[1].second <= 0.0)
          ++failed;
        worst = std::max(worst, est.empirical_constant);
      }
    }
  detail = fmt("p in {2,3}, q in {(p-1)/4, (p-1)/2}, three data each: "
               "%d/%d cells under cap, worst constant %.3f (cap %.1f)",
               cells - failed, cells, worst, kCap);
  return failed == 0;
}

// ---------------------------------------------------------------------------
// 12. Hodge remainder rigidity

bool crit_hodge(std::string& detail) {
  const double kRatioCap = 0.45;  // frozen; observed [0.15, 0.23]
  auto dom = unit_box(2, 33);
  double lo = 1e300, hi = 0.0;
  int bad = 0;
  for (int seed = 1; seed <= 20; ++seed) {
    Rng rng(seed * 1000 + 7);
    auto fn = smooth_function(rng, 2);
    VectorField w(dom, 1, 1);
    w.fill_from([&fn](const Point& x, double* out) {
      out[0] = 16.0 * x[0] * (1.0 - x[0]) * x[1] * (1.0 - x[1]) * fn(x);
    });
    for (double d : {0.05, 0.1, 0.2}) {
      auto rep = hodge_rigidity_check(w, d, 2.5);
      if (!rep.solver_converged || rep.divergence_residual > 1e-6) ++bad;
      lo = std::min(lo, rep.rigidity_ratio);
      hi = std::max(hi, rep.rigidity_ratio);
    }
  }

  double collapse = 0.0;
  for (int seed : {17, 18, 19}) {
    Rng rng(seed * 1000 + 7);
    auto fn = smooth_function(rng, 2);
    VectorField w(dom, 1, 1);
    w.fill_from([&fn](const Point& x, double* out) {
      out[0] = 16.0 * x[0] * (1.0 - x[0]) * x[1] * (1.0 - x[1]) * fn(x);
    });
    auto rep = hodge_rigidity_check(w, 0.0, 2.5);
    if (!rep.solver_converged) ++bad;
    collapse = std::max(collapse, rep.h_norm / (1.0 + rep.dw_norm));
  }

  detail = fmt("20 fields x three exponents: ratio in [%.3f, %.3f] under one "
               "cap %.2f, %d solver/divergence faults; zero-exponent "
               "remainder %.1e (tol 1e-8)",
               lo, hi, kRatioCap, bad, collapse);
  return bad == 0 && hi <= kRatioCap && lo > 0.01 && collapse <= 1e-8;
}

// ---------------------------------------------------------------------------
// 13. determinism

std::string pipeline_fingerprint(unsigned seed) {
  std::string acc;
  char buf[64];
  auto put = [&](double x) {
    std::snprintf(buf, sizeof buf, "%.17g;", x);
    acc += buf;
  };

  // solve: trace and solution samples
  const int npts = 17;
  Grid g(2, Index{npts, npts, 1}, 1.0 / (npts - 1), Point{0.3, 0.3, 0.0});
  auto dom = make_box_domain(g);
  Model m = Model::p_laplace(2, 1, 3.0, 1e-4);
  VectorField bd(dom, 1, 1);
  bd.fill_from([](const Point& x, double* out) {
    out[0] = 0.5 * (x[0] * x[0] + x[1] * x[1]);
  });
  VectorField f(dom, 1, 1);
  f.fill_from([](const Point& x, double* out) {
    out[0] = -3.0 * std::hypot(x[0], x[1]);
  });
  DirichletProblem prob{m, dom, bd, VectorField(dom, 1, 1), BSpec{}};
  auto [u, rep] = solve_dirichlet(prob, f);
  for (double e : rep.energy_trace) put(e);
  for (std::int64_t pt : dom->members()) put(u.at(pt, 0, 0));

  // seeded field: norms, potentials, identity report
  Rng rng(seed);
  auto dom2 = unit_box(2, 33);
  ScalarField V(dom2);
  for (std::int64_t pt : dom2->members()) V[pt] = 0.5 * rng.lognormal(0.6);
  RearrangementProfile mu = rearrange(V);
  put(lorentz_quasinorm(mu, 3.0, 1.0));
  put(lorentz_quasinorm_layercake(mu, 3.0, 1.0));
  put(lorentz_norm(mu, 2.0, 2.0));
  const Point c = mid(dom2->grid());
  put(p_potential_value(V, c, 0.3));
  put(p_potential_dyadic(V, c, 0.15));
  put(wolff_potential(V, c, 0.3, 0.5, 3.0));
  ScalarField pf = p_potential_field(V, 0.2);
  double sumpf = 0.0;
  for (std::int64_t pt : dom2->members()) sumpf += pf[pt];
  put(sumpf);
  auto sq = square_identity_check(V, 3);
  put(sq.lhs);
  put(sq.rhs);

  // estimates: truncation energy, level recursion, rigidity
  ScalarField v = bernstein_v(u, m);
  ScalarField tv(dom);
  for (std::int64_t pt : dom->members()) tv[pt] = 0.7;
  auto cac = caccioppoli_check({v, tv, kBall, 0.3 * sup_norm(v, kBall)}, 1.6);
  put(cac.lhs);
  put(cac.rhs_total);
  put(cac.empirical_constant);
  auto dg = degiorgi_iterate(v, tv, {0.8, 0.8, 0.0}, 0.1, 0.5);
  for (double lv : dg.levels) put(lv);
  put(dg.empirical_constant);

  Rng rng2(seed + 1);
  auto fn = smooth_function(rng2, 2);
  auto domu = unit_box(2, 33);
  VectorField w(domu, 1, 1);
  w.fill_from([&fn](const Point& x, double* out) {
    out[0] = 16.0 * x[0] * (1.0 - x[0]) * x[1] * (1.0 - x[1]) * fn(x);
  });
  auto hr = hodge_rigidity_check(w, 0.1, 2.5);
  put(hr.h_norm);
  put(hr.rigidity_ratio);
  put(hr.divergence_residual);
  return acc;
}

bool crit_determinism(std::string& detail) {
  const std::string a = pipeline_fingerprint(20260816);
  const std::string b = pipeline_fingerprint(20260816);
  const bool equal = a == b;
  size_t first_diff = 0;
  if (!equal) {
    while (first_diff < std::min(a.size(), b.size()) &&
           a[first_diff] == b[first_diff])
      ++first_diff;
  }
  detail = equal ? fmt("two full pipeline runs, %zu serialized bytes "
                       "byte-identical",
                       a.size())
                 : fmt("runs differ at byte %zu of %zu", first_diff, a.size());
  return equal;
}

}  // namespace

int main() {
  Harness h;
  std::printf("acceptance: thirteen pinned properties, oracle- and "
              "cap-checked\n");
  h.run("decreasing rearrangement is exactly equimeasurable; layer-cake "
        "quasinorm identity",
        crit_rearrangement);
  h.run("square identity between the (3,1) and (3/2,1/2) quasinorms",
        crit_square_identity);
  h.run("maximal-function norm dominates the quasinorm with a "
        "refinement-stable ratio",
        crit_hunt);
  h.run("potential closed forms to 1e-4 and the dyadic lower bound",
        crit_potentials);
  h.run("manufactured solutions converge monotonically at first order or "
        "better",
        crit_convergence);
  h.run("no accepted Newton step increases the discrete energy",
        crit_energy_monotone);
  h.run("interior gradient bound holds under one frozen cap",
        crit_gradient_bound);
  h.run("level recursion bounds the solved field at 100 sampled centers",
        crit_degiorgi);
  h.run("truncation-energy and oscillation caps with exact rescaling "
        "invariance",
        crit_caccioppoli_oscillation);
  h.run("critical growth: contraction below threshold, detected blow-up at "
        "100x amplitude",
        crit_critical_dichotomy);
  h.run("subcritical gradient bound under its cap on the datum catalog",
        crit_subcritical);
  h.run("Hodge remainder ratio bounded across exponents and zero-exponent "
        "collapse",
        crit_hodge);
  h.run("repeated runs with one seed produce byte-identical reports",
        crit_determinism);

  std::printf("%d/13 criteria passed\n", 13 - h.failures);
  return h.failures == 0 ? 0 : 1;
}
