#pragma once

// Subcommand drivers.  Each runner reads its blocks from the experiment
// config, produces CSV + JSON artifacts in the output directory, prints a
// one-line summary, and returns 0 exactly when every reported check passed
// and no solve diverged.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "catalog.hpp"
#include "config_view.hpp"
#include "reporting.hpp"
#include "plpot/calculus.hpp"
#include "plpot/estimates.hpp"
#include "plpot/lorentz.hpp"
#include "plpot/parallel.hpp"
#include "plpot/potentials.hpp"
#include "plpot/solver.hpp"

namespace plcli {

struct RunContext {
  json config;
  std::filesystem::path out_dir;
  std::uint64_t seed = 0;
  Caps caps;
};

// Per-item seed stream: distinct, stable derivations from the run seed.
inline std::uint64_t derived_seed(std::uint64_t base, std::uint64_t item) {
  return base * 1000003ULL + item * 7919ULL + 17ULL;
}

// The echoed config omits the output directory (location must not change
// report bytes) and records the resolved seed explicitly.
inline json config_echo(const RunContext& ctx) {
  json c = ctx.config;
  c.erase("out");
  return c;
}

inline plpot::Ball build_ball(const View& v, const plpot::Grid& g) {
  v.check_keys({"center", "radius"});
  plpot::Ball b{read_point(v.child("center"), g.dim()),
                v.child("radius").num()};
  if (!(b.radius > 0)) v.child("radius").fail("radius must be positive");
  return b;
}

// Concentric default ball: centered in the box, radius 0.4 of the extent,
// so the double ball used by potential terms still fits.
inline plpot::Ball default_ball(const plpot::Grid& g) {
  plpot::Point c{0.0, 0.0, 0.0};
  for (int k = 0; k < g.dim(); ++k)
    c[static_cast<std::size_t>(k)] =
        g.origin()[static_cast<std::size_t>(k)] + 0.5 * g.length(k);
  return {c, 0.4 * g.length(0)};
}

// ---------------------------------------------------------------- solve ---

struct Solved {
  plpot::Grid grid;
  plpot::DomainPtr dom;
  plpot::Model model;
  plpot::VectorField u;
  plpot::ScalarField V;
  plpot::BSpec b;
  plpot::SolveReport report;
  std::string rhs_kind;
  double oracle_sup_error = std::numeric_limits<double>::quiet_NaN();
};

// Builds grid/model/problem from the config and runs the configured solve:
// "manufactured" (closed-form oracle, direct), "zero" (no right-hand side,
// direct), or "v-driven" (datum V with growth factor b, outer fixed point).
inline Solved solve_from_config(const View& root, const RunContext& ctx) {
  plpot::Grid grid = build_grid(root.child("grid"));
  plpot::DomainPtr dom = plpot::make_box_domain(grid);
  plpot::Model model = build_model(root.child("model"), grid.dim());
  const View prob = root.child("problem");
  prob.check_keys({"boundary", "V", "b", "rhs", "solver"});

  plpot::SolverOptions opt;
  if (auto sv = prob.opt("solver")) opt = build_solver_options(*sv);

  std::string rhs_kind = "v-driven";
  if (auto rv = prob.opt("rhs")) {
    rv->check_keys({"kind"});
    rhs_kind = rv->str("kind", "v-driven");
    if (rhs_kind != "v-driven" && rhs_kind != "manufactured" &&
        rhs_kind != "zero")
      rv->child("kind").fail(
          "kind must be \"v-driven\", \"manufactured\", or \"zero\"");
  }

  plpot::ScalarField V(dom);
  if (auto vv = prob.opt("V")) V = build_scalar_field(*vv, dom, ctx.seed);
  plpot::BSpec b;
  if (auto bb = prob.opt("b")) b = build_bspec(*bb);

  if (rhs_kind == "manufactured") {
    if (model.N() != 1)
      root.child("model").fail("manufactured runs require N = 1");
    if (prob.has("boundary"))
      prob.child("boundary").fail(
          "manufactured runs fix the boundary to the quadratic oracle; "
          "remove this block");
    plpot::VectorField bd = manufactured_boundary(dom);
    plpot::VectorField f = scalar_to_vector(manufactured_rhs(dom, model));
    plpot::DirichletProblem dp{model, dom, bd, scalar_to_vector(V), b};
    auto [u, rep] = plpot::solve_dirichlet(dp, f, opt);
    double err = 0.0;
    const plpot::Grid& g = grid;
    for (std::int64_t p : dom->members()) {
      const double exact = manufactured_value(g.point(g.unflat(p)), g.dim());
      err = std::max(err, std::abs(u.at(p, 0, 0) - exact));
    }
    return Solved{grid, dom,      model,    std::move(u), std::move(V),
                  b,    rep,      rhs_kind, err};
  }

  plpot::VectorField bd(dom, model.N(), 1);
  if (auto bb = prob.opt("boundary")) bd = build_boundary(*bb, dom, model.N());

  if (rhs_kind == "zero") {
    plpot::VectorField f(dom, model.N(), 1);
    plpot::DirichletProblem dp{model, dom, bd,
                               plpot::VectorField(dom, model.N(), 1), b};
    auto [u, rep] = plpot::solve_dirichlet(dp, f, opt);
    return Solved{grid, dom, model, std::move(u), std::move(V),
                  b,    rep, rhs_kind};
  }

  if (model.N() != 1)
    root.child("model").fail("V-driven runs require N = 1");
  plpot::DirichletProblem dp{model, dom, bd, scalar_to_vector(V), b};
  auto [u, rep] = plpot::fixed_point_solve(dp, opt);
  return Solved{grid, dom, model, std::move(u), std::move(V),
                b,    rep, rhs_kind};
}

inline int run_solve(const RunContext& ctx) {
  const View root(ctx.config, "");
  Solved s = solve_from_config(root, ctx);

  plpot::write_field((ctx.out_dir / "solution.plfield").string(), s.u);

  {
    CsvWriter trace(ctx.out_dir / "energy_trace.csv", {"step", "energy"});
    for (std::size_t i = 0; i < s.report.energy_trace.size(); ++i)
      trace.row({fmt(static_cast<long long>(i)), fmt(s.report.energy_trace[i])});
  }
  if (!s.report.picard_increments.empty()) {
    CsvWriter inc(ctx.out_dir / "picard_increments.csv",
                  {"step", "increment"});
    for (std::size_t i = 0; i < s.report.picard_increments.size(); ++i)
      inc.row({fmt(static_cast<long long>(i)),
               fmt(s.report.picard_increments[i])});
  }

  const bool ok = s.report.converged && !s.report.diverged;
  json out = {{"command", "solve"},
              {"seed", ctx.seed},
              {"config", config_echo(ctx)},
              {"solve", to_json(s.report)},
              {"rhs_kind", s.rhs_kind},
              {"passed", ok}};
  if (s.rhs_kind == "manufactured")
    out["oracle_sup_error"] = json_num(s.oracle_sup_error);
  write_json_file(ctx.out_dir / "solve_report.json", out);

  if (ok)
    std::cout << "plpot solve: converged in " << s.report.newton_iterations
              << " Newton steps, residual " << fmt(s.report.final_residual)
              << "\n";
  else
    std::cout << "plpot solve: FAILED (converged="
              << (s.report.converged ? "yes" : "no")
              << ", diverged=" << (s.report.diverged ? "yes" : "no") << ")\n";
  return ok ? 0 : 1;
}

// ------------------------------------------------------------- potential --

inline int run_potential(const RunContext& ctx) {
  const View root(ctx.config, "");
  plpot::Grid grid = build_grid(root.child("grid"));
  plpot::DomainPtr dom = plpot::make_box_domain(grid);
  const int n = grid.dim();

  const View pot = root.child("potential");
  pot.check_keys({"V", "R", "centers", "count", "wolff_beta", "wolff_p"});
  plpot::ScalarField V = build_scalar_field(pot.child("V"), dom, ctx.seed);
  const double R = pot.child("R").num();
  if (!(R > 0)) pot.child("R").fail("R must be positive");
  const double wolff_p = pot.num("wolff_p", 2.0);
  if (pot.has("wolff_p") && !(wolff_p > 1))
    pot.child("wolff_p").fail("wolff_p must exceed 1");
  // Default order beta = n / (2 wolff_p): the midpoint of the admissible
  // range (0, n / wolff_p).
  const double beta = pot.num("wolff_beta", 0.5 * n / wolff_p);
  if (pot.has("wolff_beta") && (!(beta > 0) || !(beta * wolff_p < n)))
    pot.child("wolff_beta")
        .fail("wolff_beta must lie in (0, dim / wolff_p)");

  std::vector<plpot::Point> centers;
  if (pot.has("centers")) {
    for (const View& c : pot.child("centers").items())
      centers.push_back(read_point(c, n));
  } else {
    const long long count = pot.integer("count", 16);
    if (count < 1) pot.child("count").fail("count must be at least 1");
    if (!(2.0 * R < grid.length(0)))
      pot.child("R").fail("R too large to seed centers inside the box");
    plpot::Rng rng(derived_seed(ctx.seed, 1));
    for (long long i = 0; i < count; ++i) {
      plpot::Point x{0.0, 0.0, 0.0};
      for (int k = 0; k < n; ++k)
        x[static_cast<std::size_t>(k)] =
            rng.uniform(grid.origin()[static_cast<std::size_t>(k)] + R,
                        grid.origin()[static_cast<std::size_t>(k)] +
                            grid.length(k) - R);
      centers.push_back(x);
    }
  }

  struct Row {
    plpot::Point x;
    double pR, p2R, dyadic, lower, wolff;
    bool passed;
  };
  std::vector<Row> rows(centers.size());
  plpot::parallel_chunks(centers.size(), [&](int, std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      Row& r = rows[i];
      r.x = centers[i];
      r.pR = plpot::p_potential_value(V, r.x, R);
      r.p2R = plpot::p_potential_value(V, r.x, 2.0 * R);
      r.dyadic = plpot::p_potential_dyadic(V, r.x, R);
      r.lower = plpot::dyadic_constant(n) * r.dyadic;
      r.wolff = plpot::wolff_potential(V, r.x, R, beta, wolff_p);
      r.passed = r.lower <= r.p2R + 1e-9 * (1.0 + r.p2R);
    }
  });

  CsvWriter csv(ctx.out_dir / "potential_rows.csv",
                {"index", "x0", "x1", "x2", "R", "p_potential",
                 "p_potential_2R", "dyadic_sum", "dyadic_lower", "wolff",
                 "passed"});
  bool all_passed = true;
  double max_pot = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Row& r = rows[i];
    csv.row({fmt(static_cast<long long>(i)), fmt(r.x[0]), fmt(r.x[1]),
             fmt(r.x[2]), fmt(R), fmt(r.pR), fmt(r.p2R), fmt(r.dyadic),
             fmt(r.lower), fmt(r.wolff), fmt(r.passed)});
    all_passed = all_passed && r.passed;
    max_pot = std::max(max_pot, r.pR);
  }

  write_json_file(ctx.out_dir / "potential_report.json",
                  {{"command", "potential"},
                   {"seed", ctx.seed},
                   {"config", config_echo(ctx)},
                   {"rows", rows.size()},
                   {"radius", R},
                   {"max_p_potential", json_num(max_pot)},
                   {"all_passed", all_passed}});

  std::cout << "plpot potential: " << rows.size() << " centers, max P^V "
            << fmt(max_pot) << (all_passed ? "" : ", dyadic bound FAILED")
            << "\n";
  return all_passed ? 0 : 1;
}

// --------------------------------------------------------------- lorentz --

inline int run_lorentz(const RunContext& ctx) {
  const View root(ctx.config, "");
  plpot::Grid grid = build_grid(root.child("grid"));
  plpot::DomainPtr dom = plpot::make_box_domain(grid);

  const View lor = root.child("lorentz");
  lor.check_keys({"gamma", "q", "count", "sigma", "amplitude", "square_n",
                  "V"});
  const double gamma = lor.num("gamma", 3.0);
  if (!(gamma > 0)) lor.child("gamma").fail("gamma must be positive");
  const double q = lor.num("q", 1.0);
  if (!(q > 0)) lor.child("q").fail("q must be positive");
  const int square_n = static_cast<int>(lor.integer("square_n", 3));
  if (square_n < 2) lor.child("square_n").fail("square_n must be at least 2");
  const long long count = lor.integer("count", 20);
  if (count < 1) lor.child("count").fail("count must be at least 1");
  const double sigma = lor.num("sigma", 1.0);
  const double amplitude = lor.num("amplitude", 1.0);

  struct Row {
    double qn, lc, rel, norm, sq_lhs, sq_rhs, sq_rel;
    bool passed;
  };
  std::vector<Row> rows(static_cast<std::size_t>(count));
  plpot::parallel_chunks(
      rows.size(), [&](int, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
          plpot::ScalarField f(dom);
          if (lor.has("V")) {
            f = build_scalar_field(lor.child("V"), dom,
                                   derived_seed(ctx.seed, i));
          } else {
            plpot::Rng rng(derived_seed(ctx.seed, i));
            std::vector<double>& raw = f.raw();
            for (std::int64_t p : dom->members())
              raw[p] = amplitude * rng.lognormal(sigma);
          }
          Row& r = rows[i];
          plpot::RearrangementProfile prof = plpot::rearrange(f);
          r.qn = plpot::lorentz_quasinorm(prof, gamma, q);
          r.lc = plpot::lorentz_quasinorm_layercake(prof, gamma, q);
          r.rel = std::abs(r.qn - r.lc) / std::max(r.qn, 1e-300);
          r.norm = plpot::lorentz_norm(prof, gamma, q);
          plpot::SquareIdentityReport sq =
              plpot::square_identity_check(f, square_n);
          r.sq_lhs = sq.lhs;
          r.sq_rhs = sq.rhs;
          r.sq_rel = sq.rel_gap;
          r.passed = r.rel <= 1e-8 && r.sq_rel <= 1e-8;
        }
      });

  CsvWriter csv(ctx.out_dir / "lorentz_rows.csv",
                {"index", "gamma", "q", "quasinorm", "layercake", "rel_gap",
                 "lorentz_norm", "square_lhs", "square_rhs", "square_rel_gap",
                 "passed"});
  bool all_passed = true;
  double max_rel = 0.0, max_sq = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Row& r = rows[i];
    csv.row({fmt(static_cast<long long>(i)), fmt(gamma), fmt(q), fmt(r.qn),
             fmt(r.lc), fmt(r.rel), fmt(r.norm), fmt(r.sq_lhs), fmt(r.sq_rhs),
             fmt(r.sq_rel), fmt(r.passed)});
    all_passed = all_passed && r.passed;
    max_rel = std::max(max_rel, r.rel);
    max_sq = std::max(max_sq, r.sq_rel);
  }

  write_json_file(ctx.out_dir / "lorentz_report.json",
                  {{"command", "lorentz"},
                   {"seed", ctx.seed},
                   {"config", config_echo(ctx)},
                   {"rows", rows.size()},
                   {"max_rel_gap", json_num(max_rel)},
                   {"max_square_rel_gap", json_num(max_sq)},
                   {"all_passed", all_passed}});

  std::cout << "plpot lorentz: " << rows.size()
            << " fields, max layer-cake gap " << fmt(max_rel)
            << ", max square-identity gap " << fmt(max_sq)
            << (all_passed ? "" : " — FAILED") << "\n";
  return all_passed ? 0 : 1;
}

// ---------------------------------------------------------------- verify --

namespace detail {

inline std::pair<double, double> ball_range(const plpot::ScalarField& v,
                                            const plpot::Ball& B) {
  const plpot::Grid& g = v.grid();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::int64_t p : v.domain_ptr()->members()) {
    if (plpot::dist(g.point(g.unflat(p)), B.center, g.dim()) >= B.radius)
      continue;
    lo = std::min(lo, v[p]);
    hi = std::max(hi, v[p]);
  }
  plpot::require(lo <= hi, "ball contains no grid points");
  return {lo, hi};
}

inline plpot::ScalarField truncated_square(const plpot::ScalarField& v,
                                           double k) {
  plpot::ScalarField out(v.domain_ptr());
  const std::vector<double>& src = v.raw();
  std::vector<double>& dst = out.raw();
  for (std::int64_t p : v.domain_ptr()->members()) {
    const double t = std::max(src[p] - k, 0.0);
    dst[p] = t * t;
  }
  return out;
}

struct VerifyRow {
  std::string estimate;
  double param = 0.0;
  double lhs = 0.0;
  double rhs_total = 0.0;
  double empirical = 0.0;
  double cap = 0.0;
  bool passed = false;
  json detail;
};

inline VerifyRow row_of(const plpot::EstimateReport& r, double param) {
  return {r.name,          param, r.lhs,    r.rhs_total,
          r.empirical_constant, r.cap, r.passed, to_json(r)};
}

}  // namespace detail

inline int run_verify(const RunContext& ctx) {
  using detail::VerifyRow;
  const View root(ctx.config, "");
  const View ver = root.child("verify");
  ver.check_keys({"estimate", "variant", "t", "q", "Gamma", "levels",
                  "centers", "R", "delta", "d_scale", "ball", "inner",
                  "outer"});
  const std::string which = ver.child("estimate").str();
  const bool run_all = which == "all";
  if (!run_all && which != "gradient-bound" && which != "caccioppoli" &&
      which != "oscillation" && which != "degiorgi" &&
      which != "lorentz-lipschitz")
    ver.child("estimate")
        .fail("estimate must be one of \"gradient-bound\", \"caccioppoli\", "
              "\"oscillation\", \"degiorgi\", \"lorentz-lipschitz\", \"all\"");

  Solved s = solve_from_config(root, ctx);
  const plpot::Grid& g = s.grid;
  plpot::Ball ball = default_ball(g);
  if (auto bv = ver.opt("ball")) ball = build_ball(*bv, g);

  std::vector<VerifyRow> rows;

  // Weighted datum shared by the excess-decay checks: the growth-factor
  // weight when the problem uses one, the gradient weight otherwise.
  auto weighted_datum = [&]() {
    if (s.b.kind == plpot::BKind::power)
      return plpot::tilde_V(s.V, s.u, s.model, ball,
                            plpot::TildeVariant::growth_weight, s.b.q,
                            s.b.Gamma);
    return plpot::tilde_V(s.V, s.u, s.model, ball,
                          plpot::TildeVariant::gradient_weight);
  };

  if (run_all || which == "gradient-bound") {
    const std::string variant = ver.str("variant", "potential");
    plpot::GradientBoundVariant gv;
    std::string cap_name;
    if (variant == "potential") {
      gv = plpot::GradientBoundVariant::potential;
      cap_name = "gradient-bound";
    } else if (variant == "critical") {
      gv = plpot::GradientBoundVariant::critical;
      cap_name = "gradient-bound";
    } else if (variant == "subcritical") {
      gv = plpot::GradientBoundVariant::subcritical;
      cap_name = "subcritical";
    } else if (variant == "general-growth") {
      gv = plpot::GradientBoundVariant::general_growth;
      cap_name = "general-growth";
    } else {
      ver.child("variant")
          .fail("variant must be one of \"potential\", \"critical\", "
                "\"subcritical\", \"general-growth\"");
    }
    const double t = ver.num("t", 0.0);
    const double qq = ver.num("q", s.b.q);
    const double Gamma = ver.num("Gamma", s.b.Gamma);
    plpot::EstimateReport r = plpot::check_gradient_bound(
        s.u, s.model, s.V, ball, gv, ctx.caps.get(cap_name), t, qq, Gamma);
    rows.push_back(detail::row_of(r, 0.0));
  }

  if (run_all || which == "caccioppoli" || which == "oscillation") {
    const long long levels = ver.integer("levels", 10);
    if (levels < 1) ver.child("levels").fail("levels must be at least 1");
    const double d_scale = ver.num("d_scale", 0.9);
    if (!(d_scale > 0)) ver.child("d_scale").fail("d_scale must be positive");

    plpot::ScalarField v = plpot::bernstein_v(s.u, s.model);
    plpot::ScalarField tv = weighted_datum();
    auto [vmin, vmax] = detail::ball_range(v, ball);
    const double chi = plpot::sobolev_chi(g.dim());
    const plpot::Ball half{ball.center, 0.5 * ball.radius};

    for (long long j = 0; j < levels; ++j) {
      const double k =
          vmin + (vmax - vmin) * static_cast<double>(j + 1) /
                     static_cast<double>(levels + 1);
      plpot::ExcessDatum datum{v, tv, ball, k};
      if (run_all || which == "caccioppoli") {
        plpot::EstimateReport r =
            plpot::caccioppoli_check(datum, ctx.caps.get("caccioppoli"));
        rows.push_back(detail::row_of(r, k));
      }
      if (run_all || which == "oscillation") {
        plpot::ScalarField sq = detail::truncated_square(v, k);
        const double half_int = plpot::ball_integral(sq, half);
        const double cnt =
            static_cast<double>(plpot::ball_member_count(sq, half));
        double d = d_scale *
                   std::sqrt(half_int /
                             std::max(1.0, cnt * g.cell_volume()));
        if (!(d > 0)) d = 1.0;
        plpot::EstimateReport r = plpot::oscillation_check(
            datum, d, chi, ctx.caps.get("oscillation"));
        rows.push_back(detail::row_of(r, k));
      }
    }
  }

  if (run_all || which == "degiorgi") {
    const long long centers = ver.integer("centers", 20);
    if (centers < 1) ver.child("centers").fail("centers must be at least 1");
    const double R = ver.num("R", 0.1 * g.length(0));
    if (!(R > 0)) ver.child("R").fail("R must be positive");
    const double delta = ver.num("delta", 0.5);
    if (!(delta > 0) || !(delta < 1))
      ver.child("delta").fail("delta must lie in (0, 1)");
    const double margin = 2.0 * R;
    if (!(g.length(0) > 2.0 * margin))
      ver.child("R").fail("R too large: doubled balls must fit in the box");

    plpot::ScalarField v = plpot::bernstein_v(s.u, s.model);
    plpot::ScalarField tv = weighted_datum();
    const double cap = ctx.caps.get("degiorgi");
    plpot::Rng rng(derived_seed(ctx.seed, 2));
    for (long long i = 0; i < centers; ++i) {
      plpot::Point x{0.0, 0.0, 0.0};
      for (int k = 0; k < g.dim(); ++k)
        x[static_cast<std::size_t>(k)] =
            rng.uniform(g.origin()[static_cast<std::size_t>(k)] + margin,
                        g.origin()[static_cast<std::size_t>(k)] +
                            g.length(k) - margin);
      plpot::DeGiorgiResult res = plpot::degiorgi_iterate(v, tv, x, R, delta);
      bool monotone = true;
      for (std::size_t j = 1; j < res.levels.size(); ++j)
        monotone = monotone && res.levels[j] >= res.levels[j - 1];
      VerifyRow row;
      row.estimate = "level-recursion";
      row.param = static_cast<double>(i);
      row.lhs = res.value_at_center;
      row.rhs_total = res.average_term + res.potential_term;
      row.empirical = res.empirical_constant;
      row.cap = cap;
      row.passed = monotone && std::isfinite(res.empirical_constant) &&
                   res.empirical_constant <= cap;
      row.detail = {{"name", "level-recursion"},
                    {"center", {x[0], x[1], x[2]}},
                    {"radius", R},
                    {"delta", delta},
                    {"levels", res.levels.size()},
                    {"limit", json_num(res.limit)},
                    {"average_term", json_num(res.average_term)},
                    {"potential_term", json_num(res.potential_term)},
                    {"value_at_center", json_num(res.value_at_center)},
                    {"empirical_constant", json_num(res.empirical_constant)},
                    {"monotone", monotone},
                    {"cap", cap},
                    {"passed", row.passed}};
      rows.push_back(std::move(row));
    }
  }

  if (which == "lorentz-lipschitz" ||
      (run_all && ver.has("inner") && ver.has("outer"))) {
    if (g.dim() != 3)
      ver.child("estimate")
          .fail("lorentz-lipschitz requires grid.dim = 3");
    plpot::Ball inner = build_ball(ver.child("inner"), g);
    plpot::Ball outer = build_ball(ver.child("outer"), g);
    plpot::EstimateReport r = plpot::check_lorentz_lipschitz(
        s.u, s.model, s.V, inner, outer, ctx.caps.get("lorentz-lipschitz"));
    rows.push_back(detail::row_of(r, 0.0));
  }

  CsvWriter csv(ctx.out_dir / "verify_rows.csv",
                {"estimate", "param", "lhs", "rhs_total",
                 "empirical_constant", "cap", "passed"});
  bool all_passed = s.report.converged && !s.report.diverged;
  json checks = json::array();
  int npassed = 0;
  for (const VerifyRow& r : rows) {
    csv.row({r.estimate, fmt(r.param), fmt(r.lhs), fmt(r.rhs_total),
             fmt(r.empirical), fmt(r.cap), fmt(r.passed)});
    checks.push_back(r.detail);
    all_passed = all_passed && r.passed;
    npassed += r.passed ? 1 : 0;
  }

  write_json_file(ctx.out_dir / "verify_report.json",
                  {{"command", "verify"},
                   {"seed", ctx.seed},
                   {"config", config_echo(ctx)},
                   {"caps", ctx.caps.to_json()},
                   {"solve", to_json(s.report)},
                   {"checks", checks},
                   {"all_passed", all_passed}});

  std::cout << "plpot verify: " << npassed << "/" << rows.size()
            << " checks passed"
            << (all_passed ? "" : " — FAILED") << "\n";
  return all_passed ? 0 : 1;
}

// ----------------------------------------------------------------- hodge --

inline int run_hodge(const RunContext& ctx) {
  const View root(ctx.config, "");
  const View hd = root.child("hodge");
  hd.check_keys({"dim", "npts", "t", "deltas", "seeds"});
  const int dim = static_cast<int>(hd.integer("dim", 2));
  if (dim != 2 && dim != 3) hd.child("dim").fail("dim must be 2 or 3");
  const int npts = static_cast<int>(hd.integer("npts", 33));
  if (npts < 5) hd.child("npts").fail("npts must be at least 5");
  const double t = hd.num("t", 2.5);
  if (!(t > 1)) hd.child("t").fail("t must exceed 1");
  std::vector<double> deltas =
      hd.num_array("deltas", {0.0, 0.05, 0.1, 0.2});
  for (double d : deltas)
    if (!(d > -1) || !(d < t - 1))
      hd.child("deltas").fail("each delta must lie in (-1, t-1)");
  const long long seeds = hd.integer("seeds", 20);
  if (seeds < 1) hd.child("seeds").fail("seeds must be at least 1");

  plpot::Index shape{npts, npts, dim == 3 ? npts : 1};
  plpot::Grid grid(dim, shape, 1.0 / (npts - 1), plpot::Point{0.0, 0.0, 0.0});
  plpot::DomainPtr dom = plpot::make_box_domain(grid);
  const double cap = ctx.caps.get("hodge-ratio");

  struct Row {
    long long seed;
    double delta;
    plpot::HodgeReport rep;
    bool passed;
  };
  std::vector<std::vector<Row>> by_seed(static_cast<std::size_t>(seeds));
  plpot::parallel_chunks(
      static_cast<std::size_t>(seeds), [&](int, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
          plpot::Rng rng(derived_seed(ctx.seed, i) + 1000ULL);
          plpot::ScalarField w = random_bump_field(dom, rng);
          plpot::VectorField wv = scalar_to_vector(w);
          for (double d : deltas) {
            plpot::HodgeReport r = plpot::hodge_rigidity_check(wv, d, t);
            bool ok;
            if (d == 0.0)
              ok = r.h_norm <= 1e-8 * (1.0 + r.dw_norm) &&
                   r.solver_converged;
            else
              ok = r.solver_converged && r.divergence_residual <= 1e-6 &&
                   std::isfinite(r.rigidity_ratio) &&
                   r.rigidity_ratio <= cap;
            by_seed[i].push_back(
                {static_cast<long long>(i), d, r, ok});
          }
        }
      });

  CsvWriter csv(ctx.out_dir / "hodge_rows.csv",
                {"seed", "delta", "h_norm", "dphi_norm", "dw_norm",
                 "rigidity_ratio", "divergence_residual", "converged",
                 "passed"});
  bool all_passed = true;
  double max_ratio = 0.0;
  std::size_t nrows = 0;
  for (const auto& group : by_seed)
    for (const Row& r : group) {
      csv.row({fmt(r.seed), fmt(r.delta), fmt(r.rep.h_norm),
               fmt(r.rep.dphi_norm), fmt(r.rep.dw_norm),
               fmt(r.rep.rigidity_ratio), fmt(r.rep.divergence_residual),
               fmt(r.rep.solver_converged), fmt(r.passed)});
      all_passed = all_passed && r.passed;
      max_ratio = std::max(max_ratio, r.rep.rigidity_ratio);
      ++nrows;
    }

  write_json_file(ctx.out_dir / "hodge_report.json",
                  {{"command", "hodge"},
                   {"seed", ctx.seed},
                   {"config", config_echo(ctx)},
                   {"caps", ctx.caps.to_json()},
                   {"rows", nrows},
                   {"max_rigidity_ratio", json_num(max_ratio)},
                   {"all_passed", all_passed}});

  std::cout << "plpot hodge: " << nrows << " decompositions, max ratio "
            << fmt(max_ratio) << (all_passed ? "" : " — FAILED") << "\n";
  return all_passed ? 0 : 1;
}

// ----------------------------------------------------------------- sweep --

inline int run_sweep(const RunContext& ctx) {
  const View root(ctx.config, "");
  const View sw = root.child("sweep");
  sw.check_keys({"dim", "p", "npts", "eps_final", "v_amplitude", "s", "lo"});
  const int dim = static_cast<int>(sw.integer("dim", 2));
  if (dim != 2 && dim != 3) sw.child("dim").fail("dim must be 2 or 3");
  const std::vector<double> ps = sw.num_array("p", {1.5, 2.0, 3.0, 4.0});
  for (double p : ps)
    if (!(p > 1)) sw.child("p").fail("each p must exceed 1");
  std::vector<int> npts;
  if (auto nv = sw.opt("npts")) {
    for (const View& item : nv->items()) {
      const int n = static_cast<int>(item.integer());
      if (n < 3) item.fail("npts must be at least 3");
      npts.push_back(n);
    }
  } else {
    npts = {17, 33, 65};
  }
  const std::vector<double> epss = sw.num_array("eps_final", {1e-3});
  for (double e : epss)
    if (!(e > 0)) sw.child("eps_final").fail("each eps_final must be positive");
  const std::vector<double> amps = sw.num_array("v_amplitude", {0.0});
  const double s = sw.num("s", 1e-4);
  if (!(s >= 0)) sw.child("s").fail("s must be nonnegative");
  // Box corner: kept away from the origin so the oracle right-hand side
  // stays smooth for p < 2.
  const double lo = sw.num("lo", 0.3);

  struct Cell {
    double p;
    int npts;
    double eps;
    double amp;
    plpot::SolveReport rep;
    plpot::EstimateReport est;
    double oracle_err = std::numeric_limits<double>::quiet_NaN();
    bool passed = false;
  };
  std::vector<Cell> cells;
  for (double p : ps)
    for (int n : npts)
      for (double e : epss)
        for (double a : amps) {
          Cell c;
          c.p = p;
          c.npts = n;
          c.eps = e;
          c.amp = a;
          cells.push_back(std::move(c));
        }

  const double grad_cap = ctx.caps.get("gradient-bound");
  plpot::parallel_chunks(cells.size(), [&](int, std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      Cell& c = cells[i];
      plpot::Index shape{c.npts, c.npts, dim == 3 ? c.npts : 1};
      plpot::Grid grid(dim, shape, 1.0 / (c.npts - 1),
                       plpot::Point{lo, lo, dim == 3 ? lo : 0.0});
      plpot::DomainPtr dom = plpot::make_box_domain(grid);
      plpot::Model model = plpot::Model::p_laplace(dim, 1, c.p, s);
      plpot::SolverOptions opt;
      opt.eps_final = c.eps;
      opt.eps_start = std::max(c.eps, opt.eps_start);
      plpot::Ball ball = default_ball(grid);

      plpot::ScalarField V(dom);
      if (c.amp == 0.0) {
        plpot::VectorField bd = manufactured_boundary(dom);
        plpot::VectorField f = scalar_to_vector(manufactured_rhs(dom, model));
        plpot::DirichletProblem dp{model, dom, bd,
                                   plpot::VectorField(dom, 1, 1),
                                   plpot::BSpec{}};
        auto [u, rep] = plpot::solve_dirichlet(dp, f, opt);
        double err = 0.0;
        for (std::int64_t pt : dom->members()) {
          const double exact =
              manufactured_value(grid.point(grid.unflat(pt)), dim);
          err = std::max(err, std::abs(u.at(pt, 0, 0) - exact));
        }
        c.oracle_err = err;
        c.rep = rep;
        c.est = plpot::check_gradient_bound(
            u, model, V, ball, plpot::GradientBoundVariant::potential,
            grad_cap);
      } else {
        V.fill_from([&](const plpot::Point&) { return c.amp; });
        plpot::VectorField bd = manufactured_boundary(dom);
        plpot::DirichletProblem dp{model, dom, bd, scalar_to_vector(V),
                                   plpot::BSpec{}};
        auto [u, rep] = plpot::fixed_point_solve(dp, opt);
        c.rep = rep;
        c.est = plpot::check_gradient_bound(
            u, model, V, ball, plpot::GradientBoundVariant::potential,
            grad_cap);
      }
      c.passed = c.rep.converged && !c.rep.diverged && c.est.passed;
    }
  });

  CsvWriter csv(ctx.out_dir / "sweep_rows.csv",
                {"cell", "p", "npts", "eps_final", "v_amplitude", "converged",
                 "diverged", "newton_iterations", "picard_iterations",
                 "final_residual", "oracle_sup_error", "empirical_constant",
                 "cap", "passed"});
  bool all_passed = true;
  double max_emp = 0.0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const Cell& c = cells[i];
    csv.row({fmt(static_cast<long long>(i)), fmt(c.p), fmt(c.npts),
             fmt(c.eps), fmt(c.amp), fmt(c.rep.converged),
             fmt(c.rep.diverged), fmt(c.rep.newton_iterations),
             fmt(c.rep.picard_iterations), fmt(c.rep.final_residual),
             fmt(c.oracle_err), fmt(c.est.empirical_constant), fmt(c.est.cap),
             fmt(c.passed)});
    all_passed = all_passed && c.passed;
    if (std::isfinite(c.est.empirical_constant))
      max_emp = std::max(max_emp, c.est.empirical_constant);
  }

  write_json_file(ctx.out_dir / "sweep_report.json",
                  {{"command", "sweep"},
                   {"seed", ctx.seed},
                   {"config", config_echo(ctx)},
                   {"caps", ctx.caps.to_json()},
                   {"cells", cells.size()},
                   {"max_empirical_constant", json_num(max_emp)},
                   {"all_passed", all_passed}});

  std::cout << "plpot sweep: " << cells.size()
            << " cells, max empirical constant " << fmt(max_emp)
            << (all_passed ? "" : " — FAILED") << "\n";
  return all_passed ? 0 : 1;
}

}  // namespace plcli
