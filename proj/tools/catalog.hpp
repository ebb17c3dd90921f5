#pragma once

// Named ingredient catalog: grids, diffusion models, datum fields V,
// boundary values, growth factors, and a manufactured Dirichlet problem
// with a closed-form solution.  Every entry states the formula it
// implements so reported errors are auditable from the config alone.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "config_view.hpp"
#include "plpot/calculus.hpp"
#include "plpot/domain.hpp"
#include "plpot/error.hpp"
#include "plpot/field.hpp"
#include "plpot/field_io.hpp"
#include "plpot/grid.hpp"
#include "plpot/model.hpp"
#include "plpot/rng.hpp"
#include "plpot/solver.hpp"

namespace plcli {

// ---------------------------------------------------------------- grid ----

// Isotropic box grid: "dim" (2 or 3), "npts" per axis, optional corners
// "lo"/"hi" (defaults: unit box at the origin).  All extents must agree so
// that a single spacing serves every axis.
inline plpot::Grid build_grid(const View& g) {
  g.check_keys({"dim", "npts", "lo", "hi"});
  const View dimv = g.child("dim");
  const int dim = static_cast<int>(dimv.integer());
  if (dim != 2 && dim != 3) dimv.fail("dim must be 2 or 3");
  const View nv = g.child("npts");
  const int npts = static_cast<int>(nv.integer());
  if (npts < 3) nv.fail("npts must be at least 3");

  std::vector<double> lo = g.num_array("lo", std::vector<double>(dim, 0.0));
  if (static_cast<int>(lo.size()) != dim)
    g.child("lo").fail("expected " + std::to_string(dim) + " coordinates");
  std::vector<double> hi_default(dim);
  for (int k = 0; k < dim; ++k) hi_default[k] = lo[k] + 1.0;
  std::vector<double> hi = g.num_array("hi", hi_default);
  if (static_cast<int>(hi.size()) != dim)
    g.child("hi").fail("expected " + std::to_string(dim) + " coordinates");

  const double ext = hi[0] - lo[0];
  if (!(ext > 0)) g.child("hi").fail("box extent must be positive");
  for (int k = 1; k < dim; ++k)
    if (std::abs((hi[k] - lo[k]) - ext) > 1e-12 * std::abs(ext))
      g.child("hi").fail("all axes must have the same extent");

  plpot::Index shape{npts, npts, dim == 3 ? npts : 1};
  plpot::Point origin{lo[0], lo[1], dim == 3 ? lo[2] : 0.0};
  return plpot::Grid(dim, shape, ext / (npts - 1), origin);
}

// --------------------------------------------------------------- model ----

// "kind": "p-laplace" (with degeneracy shift s), "uhlenbeck" or
// "general-growth" (with growth "law": "power" or "power-log").
inline plpot::Model build_model(const View& m, int dim) {
  m.check_keys({"kind", "p", "s", "N", "law"});
  const std::string kind = m.str("kind", "p-laplace");
  const double p = m.num("p", 2.0);
  if (!(p > 1.0)) m.child("p").fail("p must exceed 1");
  const int N = static_cast<int>(m.integer("N", 1));
  if (N < 1) m.child("N").fail("N must be at least 1");

  plpot::GrowthLaw law = plpot::GrowthLaw::power;
  if (m.has("law")) {
    const std::string l = m.child("law").str();
    if (l == "power")
      law = plpot::GrowthLaw::power;
    else if (l == "power-log")
      law = plpot::GrowthLaw::power_log;
    else
      m.child("law").fail("law must be \"power\" or \"power-log\"");
  }

  if (kind == "p-laplace") {
    if (m.has("law") && law != plpot::GrowthLaw::power)
      m.child("law").fail("p-laplace supports only the power law");
    const double s = m.num("s", 1e-4);
    if (!(s >= 0)) m.child("s").fail("s must be nonnegative");
    return plpot::Model::p_laplace(dim, N, p, s);
  }
  if (m.has("s"))
    m.child("s").fail("the degeneracy shift applies only to kind p-laplace");
  if (kind == "uhlenbeck") return plpot::Model::uhlenbeck(dim, N, p, law);
  if (kind == "general-growth")
    return plpot::Model::general_growth(dim, N, p, law);
  m.child("kind").fail(
      "kind must be \"p-laplace\", \"uhlenbeck\", or \"general-growth\"");
}

// --------------------------------------------------------------- datum ----

inline plpot::Point read_point(const View& v, int dim) {
  std::vector<View> items = v.items();
  if (static_cast<int>(items.size()) != dim)
    v.fail("expected " + std::to_string(dim) + " coordinates");
  plpot::Point x{0.0, 0.0, 0.0};
  for (int k = 0; k < dim; ++k) x[k] = items[k].num();
  return x;
}

inline plpot::ScalarField scalar_from_file(const View& pv,
                                           const plpot::Grid& g) {
  const std::string path = pv.str();
  if (!std::filesystem::exists(path)) pv.fail("file not found: " + path);
  plpot::VectorField F = plpot::read_field(path);
  if (F.rows() != 1 || F.cols() != 1)
    pv.fail("expected a single-channel field, got " +
            std::to_string(F.channels()) + " channels");
  if (!F.grid().same_as(g))
    pv.fail("field grid does not match the configured grid: " + path);
  plpot::ScalarField out(F.domain_ptr());
  const std::vector<double>& src = F.raw();
  std::vector<double>& dst = out.raw();
  for (std::int64_t i = 0; i < g.npoints(); ++i) dst[i] = src[i];
  return out;
}

// Datum catalog.  Kinds:
//   "zero"             — V = 0
//   "constant"         — V = amplitude
//   "indicator"        — V = amplitude on the open ball B(center, radius)
//   "radial-power"     — V = amplitude * max(|x-center|, h/2)^(-alpha);
//                        the h/2 floor desingularizes a center that lands
//                        exactly on a lattice point
//   "random-lognormal" — V = amplitude * exp(sigma * Z), Z standard normal
//                        drawn per grid point in flat index order
//   "file"             — single-channel field read from "path"
inline plpot::ScalarField build_scalar_field(const View& v,
                                             const plpot::DomainPtr& dom,
                                             std::uint64_t seed) {
  const plpot::Grid& g = dom->grid();
  v.check_keys({"kind", "amplitude", "center", "radius", "alpha", "sigma",
                "path"});
  const std::string kind = v.str("kind", "zero");
  const double amp = v.num("amplitude", 1.0);
  plpot::ScalarField f(dom);

  if (kind == "zero") return f;
  if (kind == "constant") {
    f.fill_from([&](const plpot::Point&) { return amp; });
    return f;
  }
  if (kind == "indicator") {
    const plpot::Point c = read_point(v.child("center"), g.dim());
    const double r = v.child("radius").num();
    if (!(r > 0)) v.child("radius").fail("radius must be positive");
    f.fill_from([&](const plpot::Point& x) {
      return plpot::dist(x, c, g.dim()) < r ? amp : 0.0;
    });
    return f;
  }
  if (kind == "radial-power") {
    const plpot::Point c = read_point(v.child("center"), g.dim());
    const double alpha = v.child("alpha").num();
    if (!(alpha > 0)) v.child("alpha").fail("alpha must be positive");
    const double floor = 0.5 * g.spacing();
    f.fill_from([&](const plpot::Point& x) {
      const double d = std::max(plpot::dist(x, c, g.dim()), floor);
      return amp * std::pow(d, -alpha);
    });
    return f;
  }
  if (kind == "random-lognormal") {
    const double sigma = v.num("sigma", 1.0);
    if (!(sigma >= 0)) v.child("sigma").fail("sigma must be nonnegative");
    plpot::Rng rng(seed);
    std::vector<double>& raw = f.raw();
    for (std::int64_t p : dom->members()) raw[p] = amp * rng.lognormal(sigma);
    return f;
  }
  if (kind == "file") return scalar_from_file(v.child("path"), g);
  v.child("kind").fail(
      "kind must be one of \"zero\", \"constant\", \"indicator\", "
      "\"radial-power\", \"random-lognormal\", \"file\"");
}

inline plpot::VectorField scalar_to_vector(const plpot::ScalarField& s) {
  plpot::VectorField out(s.domain_ptr(), 1, 1);
  const std::vector<double>& src = s.raw();
  std::vector<double>& dst = out.raw();
  for (std::int64_t i = 0; i < s.grid().npoints(); ++i) dst[i] = src[i];
  return out;
}

// ------------------------------------------------------------ boundary ----

// Boundary/initial values.  Kinds:
//   "zero"      — u = 0
//   "linear"    — u_r = z_r . x + offset_r ("z" is a dim-vector for N = 1,
//                 or an array of N dim-vectors)
//   "quadratic" — u_r = amplitude * |x|^2 / 2
//   "file"      — N-channel field read from "path"
inline plpot::VectorField build_boundary(const View& bv,
                                         const plpot::DomainPtr& dom, int N) {
  const plpot::Grid& g = dom->grid();
  bv.check_keys({"kind", "z", "offset", "amplitude", "path"});
  const std::string kind = bv.str("kind", "zero");
  plpot::VectorField u(dom, N, 1);

  if (kind == "zero") return u;
  if (kind == "linear") {
    const View zv = bv.child("z");
    std::vector<plpot::Point> z(static_cast<std::size_t>(N));
    if (N == 1 && !zv.items().empty() && !zv.items()[0].raw().is_array()) {
      z[0] = read_point(zv, g.dim());
    } else {
      std::vector<View> rows = zv.items();
      if (static_cast<int>(rows.size()) != N)
        zv.fail("expected " + std::to_string(N) + " direction vectors");
      for (int r = 0; r < N; ++r)
        z[static_cast<std::size_t>(r)] = read_point(rows[static_cast<std::size_t>(r)], g.dim());
    }
    std::vector<double> offset =
        bv.num_array("offset", std::vector<double>(static_cast<std::size_t>(N), 0.0));
    if (static_cast<int>(offset.size()) != N)
      bv.child("offset").fail("expected " + std::to_string(N) + " offsets");
    u.fill_from([&](const plpot::Point& x, double* vals) {
      for (int r = 0; r < N; ++r) {
        double dot = 0.0;
        for (int k = 0; k < g.dim(); ++k)
          dot += z[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(k)];
        vals[r] = dot + offset[static_cast<std::size_t>(r)];
      }
    });
    return u;
  }
  if (kind == "quadratic") {
    const double amp = bv.num("amplitude", 1.0);
    u.fill_from([&](const plpot::Point& x, double* vals) {
      double r2 = 0.0;
      for (int k = 0; k < g.dim(); ++k) r2 += x[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(k)];
      for (int r = 0; r < N; ++r) vals[r] = amp * 0.5 * r2;
    });
    return u;
  }
  if (kind == "file") {
    const View pv = bv.child("path");
    const std::string path = pv.str();
    if (!std::filesystem::exists(path)) pv.fail("file not found: " + path);
    plpot::VectorField F = plpot::read_field(path);
    if (F.channels() != N)
      pv.fail("expected " + std::to_string(N) + " channels, got " +
              std::to_string(F.channels()));
    if (!F.grid().same_as(g))
      pv.fail("field grid does not match the configured grid: " + path);
    plpot::VectorField out(dom, N, 1);
    const std::vector<double>& src = F.raw();
    std::vector<double>& dst = out.raw();
    for (std::int64_t i = 0; i < g.npoints() * N; ++i) dst[i] = src[i];
    return out;
  }
  bv.child("kind").fail(
      "kind must be one of \"zero\", \"linear\", \"quadratic\", \"file\"");
}

// ------------------------------------------------------ growth factor -----

// Gradient growth factor on the right-hand side: "one" (plain datum),
// "power" ((s_eff + Gamma + |Du|)^q), "plain-power" (|Du|^q), "zero".
inline plpot::BSpec build_bspec(const View& bv) {
  bv.check_keys({"kind", "q", "Gamma"});
  plpot::BSpec b;
  const std::string kind = bv.str("kind", "one");
  if (kind == "one")
    b.kind = plpot::BKind::one;
  else if (kind == "power")
    b.kind = plpot::BKind::power;
  else if (kind == "plain-power")
    b.kind = plpot::BKind::plain_power;
  else if (kind == "zero")
    b.kind = plpot::BKind::zero;
  else
    bv.child("kind").fail(
        "kind must be one of \"one\", \"power\", \"plain-power\", \"zero\"");
  b.q = bv.num("q", 0.0);
  if (!(b.q >= 0)) bv.child("q").fail("q must be nonnegative");
  b.Gamma = bv.num("Gamma", 0.0);
  if (!(b.Gamma >= 0)) bv.child("Gamma").fail("Gamma must be nonnegative");
  return b;
}

// ------------------------------------------------------ solver options ----

inline plpot::SolverOptions build_solver_options(const View& sv) {
  sv.check_keys({"tol", "max_newton", "cg_tol", "max_cg", "picard_tol",
                 "max_picard", "eps_start", "eps_final", "divergence_cap",
                 "critical_c0", "critical_eps0", "smallness_radius"});
  plpot::SolverOptions o;
  o.tol = sv.num("tol", o.tol);
  o.max_newton = static_cast<int>(sv.integer("max_newton", o.max_newton));
  o.cg_tol = sv.num("cg_tol", o.cg_tol);
  o.max_cg = static_cast<int>(sv.integer("max_cg", o.max_cg));
  o.picard_tol = sv.num("picard_tol", o.picard_tol);
  o.max_picard = static_cast<int>(sv.integer("max_picard", o.max_picard));
  o.eps_start = sv.num("eps_start", o.eps_start);
  o.eps_final = sv.num("eps_final", o.eps_final);
  o.divergence_cap = sv.num("divergence_cap", o.divergence_cap);
  o.critical_c0 = sv.num("critical_c0", o.critical_c0);
  o.critical_eps0 = sv.num("critical_eps0", o.critical_eps0);
  o.smallness_radius = sv.num("smallness_radius", o.smallness_radius);
  if (!(o.tol > 0)) sv.child("tol").fail("tol must be positive");
  if (!(o.eps_final > 0))
    sv.child("eps_final").fail("eps_final must be positive");
  return o;
}

// ------------------------------------------------- manufactured oracle ----

// Manufactured Dirichlet problem: the exact minimizer is u*(x) = |x|^2 / 2,
// so Du* = x.  For the shifted p-power density a(Du) = (s^2+|Du|^2)^((p-2)/2) Du
// the divergence evaluates in closed form to
//   div a(x) = n (s^2+|x|^2)^((p-2)/2) + (p-2) (s^2+|x|^2)^((p-4)/2) |x|^2,
// so solving with f = -div a(x) and boundary u* recovers u* exactly in the
// continuum.  Any reported discrepancy is pure discretization + solver error.
inline double manufactured_value(const plpot::Point& x, int dim) {
  double r2 = 0.0;
  for (int k = 0; k < dim; ++k) r2 += x[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(k)];
  return 0.5 * r2;
}

inline plpot::ScalarField manufactured_rhs(const plpot::DomainPtr& dom,
                                           const plpot::Model& model) {
  plpot::require(model.kind() == plpot::ModelKind::pLaplace,
                 "manufactured problems use the p-laplace model");
  const int n = dom->grid().dim();
  const double p = model.p();
  const double s = model.s();
  plpot::ScalarField f(dom);
  f.fill_from([&](const plpot::Point& x) {
    double r2 = 0.0;
    for (int k = 0; k < n; ++k) r2 += x[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(k)];
    const double m2 = s * s + r2;
    const double div = n * std::pow(m2, 0.5 * (p - 2.0)) +
                       (p - 2.0) * std::pow(m2, 0.5 * (p - 4.0)) * r2;
    return -div;
  });
  return f;
}

inline plpot::VectorField manufactured_boundary(const plpot::DomainPtr& dom) {
  plpot::VectorField u(dom, 1, 1);
  const int n = dom->grid().dim();
  u.fill_from([&](const plpot::Point& x, double* vals) {
    vals[0] = manufactured_value(x, n);
  });
  return u;
}

// ------------------------------------------------------- random fields ----

// Random test field for decomposition sweeps: a polynomial bump vanishing
// on the box boundary times a low-frequency random cosine series.  The bump
// keeps the trace zero exactly while the series varies with the seed.
inline plpot::ScalarField random_bump_field(const plpot::DomainPtr& dom,
                                            plpot::Rng& rng) {
  const plpot::Grid& g = dom->grid();
  const int n = g.dim();
  struct Mode {
    double a, k0, k1, k2, phase;
  };
  std::vector<Mode> modes;
  for (int m = 1; m <= 4; ++m)
    modes.push_back({rng.uniform(-1.0, 1.0) / m,
                     static_cast<double>(rng.uniform_int(1, 3)),
                     static_cast<double>(rng.uniform_int(1, 3)),
                     static_cast<double>(rng.uniform_int(1, 3)),
                     rng.uniform(0.0, 6.283185307179586)});
  plpot::ScalarField f(dom);
  f.fill_from([&](const plpot::Point& x) {
    double bump = 1.0;
    double t[3] = {0.0, 0.0, 0.0};
    for (int k = 0; k < n; ++k) {
      t[k] = (x[static_cast<std::size_t>(k)] - g.origin()[static_cast<std::size_t>(k)]) / g.length(k);
      bump *= 4.0 * t[k] * (1.0 - t[k]);
    }
    double series = 1.0;
    for (const Mode& m : modes) {
      double phase = m.phase + 3.141592653589793 * (m.k0 * t[0] + m.k1 * t[1]);
      if (n == 3) phase += 3.141592653589793 * m.k2 * t[2];
      series += 0.5 * m.a * std::cos(phase);
    }
    return bump * series;
  });
  return f;
}

}  // namespace plcli
