#include "plpot/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "plpot/calculus.hpp"
#include "plpot/error.hpp"
#include "plpot/lorentz.hpp"
#include "plpot/potentials.hpp"
#include "plpot/solver.hpp"

namespace plpot {

namespace {

EstimateReport make_report(std::string name, double lhs,
                           std::vector<std::pair<std::string, double>> terms,
                           double cap, bool precondition_ok = true) {
  EstimateReport r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs_terms = std::move(terms);
  r.cap = cap;
  r.precondition_ok = precondition_ok;
  double total = 0.0;
  bool finite = std::isfinite(lhs);
  for (const auto& [label, value] : r.rhs_terms) {
    total += value;
    finite = finite && std::isfinite(value);
  }
  r.rhs_total = total;
  if (total > 0.0)
    r.empirical_constant = lhs / total;
  else
    r.empirical_constant =
        lhs == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  r.passed = precondition_ok && finite && std::isfinite(r.empirical_constant) &&
             r.empirical_constant <= cap;
  return r;
}

// (v - k)_+ over the whole domain; zero outside members by construction.
ScalarField positive_part(const ScalarField& v, double k) {
  ScalarField out(v.domain_ptr());
  for (std::int64_t p : v.domain().members())
    out[p] = std::max(v[p] - k, 0.0);
  return out;
}

ScalarField squared(const ScalarField& f) {
  ScalarField out(f.domain_ptr());
  for (std::int64_t p : f.domain().members()) out[p] = f[p] * f[p];
  return out;
}

// Forward-difference gradient: row r, direction k holds
// (w(x + h e_k) - w(x)) / h at points whose forward neighbors all lie in the
// domain, and zero elsewhere. The zero extension makes the summation-by-parts
// identity against the backward divergence exact.
VectorField forward_gradient(const VectorField& w) {
  const Grid& g = w.grid();
  const int dim = g.dim();
  const int N = w.rows();
  VectorField out(w.domain_ptr(), N, dim);
  const Domain& dom = w.domain();
  for (std::int64_t p : dom.members()) {
    Index ix = g.unflat(p);
    bool ok = true;
    std::int64_t nb[3] = {0, 0, 0};
    for (int k = 0; k < dim && ok; ++k) {
      Index jx = ix;
      ++jx[k];
      if (!dom.inside(jx)) {
        ok = false;
        break;
      }
      nb[k] = g.flat(jx);
    }
    if (!ok) continue;
    for (int r = 0; r < N; ++r)
      for (int k = 0; k < dim; ++k)
        out.at(p, r, k) = (w.at(nb[k], r, 0) - w.at(p, r, 0)) / g.spacing();
  }
  return out;
}

// Backward divergence, negated: the exact adjoint of forward_gradient under
// the zero-extension convention. Out-of-range neighbors contribute zero.
VectorField backward_divergence_neg(const VectorField& F) {
  const Grid& g = F.grid();
  const int dim = g.dim();
  const int N = F.rows();
  VectorField out(F.domain_ptr(), N, 1);
  const Domain& dom = F.domain();
  for (std::int64_t p : dom.members()) {
    Index ix = g.unflat(p);
    for (int r = 0; r < N; ++r) {
      double acc = 0.0;
      for (int k = 0; k < dim; ++k) {
        double fwd = F.at(p, r, k);
        double bwd = 0.0;
        Index jx = ix;
        --jx[k];
        if (dom.inside(jx)) bwd = F.at(g.flat(jx), r, k);
        acc += (bwd - fwd) / g.spacing();
      }
      out.at(p, r, 0) = acc;
    }
  }
  return out;
}

}  // namespace

ScalarField bernstein_v(const VectorField& u, const Model& model) {
  require(u.cols() == 1, "bernstein_v: u must be a column field");
  require(u.rows() == model.N(), "bernstein_v: component count mismatch");
  require(u.grid().dim() == model.dim(), "bernstein_v: dimension mismatch");
  VectorField Du = gradient(u);
  ScalarField v(u.domain_ptr());
  const double p = model.p();
  const double se = model.s_eff();
  const bool growth = model.kind() == ModelKind::GeneralGrowth;
  for (std::int64_t q : u.domain().members()) {
    const double g = Du.norm_at(q);
    v[q] = growth ? model.h_of(g) * g : std::pow(se * se + g * g, p / 2.0);
  }
  return v;
}

ScalarField tilde_V(const ScalarField& V, const VectorField& u,
                    const Model& model, const Ball& ball, TildeVariant variant,
                    double q, double Gamma) {
  require(V.grid().same_as(u.grid()), "tilde_V: V and u must share a grid");
  require(ball.radius > 0.0, "tilde_V: radius must be positive");
  VectorField Du = gradient(u);
  const double sup = sup_norm(Du, ball);
  const double se = model.s_eff();
  const double factor = variant == TildeVariant::gradient_weight
                            ? std::sqrt(se * se + sup * sup)
                            : std::pow(se + Gamma + sup, q + 1.0);
  ScalarField out(V.domain_ptr());
  for (std::int64_t p : V.domain().members()) out[p] = factor * V[p];
  return out;
}

EstimateReport caccioppoli_check(const ExcessDatum& datum, double c1_cap) {
  require(datum.level >= 0.0, "caccioppoli_check: level must be nonnegative");
  require(datum.ball.radius > 0.0, "caccioppoli_check: radius must be positive");
  require(datum.v.grid().same_as(datum.tildeV.grid()),
          "caccioppoli_check: v and tildeV must share a grid");
  const double R = datum.ball.radius;
  const Ball half{datum.ball.center, R / 2.0};
  ScalarField trunc = positive_part(datum.v, datum.level);
  VectorField Dt = gradient(trunc);
  const double lhs = ball_integral(magnitude_squared(Dt), half);
  const double zero_order = ball_integral(squared(trunc), datum.ball) / (R * R);
  const double data = ball_integral(squared(datum.tildeV), datum.ball);
  return make_report("caccioppoli", lhs,
                     {{"zero-order", zero_order}, {"data", data}}, c1_cap);
}

double sobolev_chi(int dim) {
  require(dim == 2 || dim == 3, "sobolev_chi: dimension must be 2 or 3");
  return dim == 3 ? 1.0 / 3.0 : 0.5;
}

EstimateReport oscillation_check(const ExcessDatum& datum, double d, double chi,
                                 double cap) {
  require(d > 0.0, "oscillation_check: scale d must be positive");
  require(chi > 0.0 && chi <= 1.0, "oscillation_check: chi must lie in (0,1]");
  require(datum.level >= 0.0, "oscillation_check: level must be nonnegative");
  require(datum.ball.radius > 0.0, "oscillation_check: radius must be positive");
  require(datum.v.grid().same_as(datum.tildeV.grid()),
          "oscillation_check: v and tildeV must share a grid");
  const Grid& g = datum.v.grid();
  const int n = g.dim();
  const double R = datum.ball.radius;
  const Ball half{datum.ball.center, R / 2.0};

  // Hypothesis: the super-level set in the half ball carries less measure
  // than d^-2 times the truncation energy there.
  std::int64_t level_count = 0;
  for (std::int64_t p : datum.v.domain().members()) {
    if (dist(g.point(g.unflat(p)), half.center, n) >= half.radius) continue;
    if (datum.v[p] > datum.level) ++level_count;
  }
  const double level_measure =
      static_cast<double>(level_count) * g.cell_volume();
  ScalarField trunc = positive_part(datum.v, datum.level);
  const double half_energy = ball_integral(squared(trunc), half);
  const bool precondition_ok = level_measure <= half_energy / (d * d);

  const double full_energy = ball_integral(squared(trunc), datum.ball);
  const double data_mass = ball_integral(squared(datum.tildeV), datum.ball);
  const double rn = std::pow(R, n);
  const double lhs = std::pow(half_energy / (d * d * rn), chi / 2.0);
  const double decay = std::sqrt(full_energy / (d * d * rn));
  const double data = std::sqrt(data_mass / (d * d * std::pow(R, n - 2)));
  return make_report("oscillation-improvement", lhs,
                     {{"decay", decay}, {"data", data}}, cap, precondition_ok);
}

DeGiorgiResult degiorgi_iterate(const ScalarField& v, const ScalarField& tildeV,
                                const Point& x, double R, double delta) {
  require(R > 0.0, "degiorgi_iterate: radius must be positive");
  require(delta > 0.0 && delta < 1.0, "degiorgi_iterate: delta must lie in (0,1)");
  require(v.grid().same_as(tildeV.grid()),
          "degiorgi_iterate: v and tildeV must share a grid");
  const Grid& g = v.grid();
  const int n = g.dim();
  const double h = g.spacing();

  DeGiorgiResult out;
  out.levels.push_back(0.0);
  ScalarField sq(v.domain_ptr());
  for (int j = 0;; ++j) {
    const double rj = std::ldexp(R, 1 - j);  // 2^(1-j) R
    if (rj < 4.0 * h) break;
    const double k = out.levels.back();
    for (std::int64_t p : v.domain().members()) {
      const double t = std::max(v[p] - k, 0.0);
      sq[p] = t * t;
    }
    const double energy = ball_integral(sq, Ball{x, rj / 2.0});
    const double inc =
        std::sqrt(energy / (delta * delta * std::pow(rj, n)));
    out.levels.push_back(k + inc);
    if (inc < 1e-12) break;
  }
  out.limit = out.levels.back();

  for (std::int64_t p : v.domain().members()) sq[p] = v[p] * v[p];
  out.average_term = std::sqrt(ball_average(sq, Ball{x, R}));
  out.potential_term = p_potential_value(tildeV, x, 2.0 * R);

  const Index nearest = g.nearest(x);
  require(v.domain().inside(nearest),
          "degiorgi_iterate: center must be a domain member");
  out.value_at_center = v[g.flat(nearest)];
  const double denom = out.average_term + out.potential_term;
  if (denom > 0.0)
    out.empirical_constant = out.value_at_center / denom;
  else
    out.empirical_constant =
        out.value_at_center == 0.0 ? 0.0
                                   : std::numeric_limits<double>::infinity();
  return out;
}

EstimateReport check_gradient_bound(const VectorField& u, const Model& model,
                                    const ScalarField& V, const Ball& ball,
                                    GradientBoundVariant variant, double cap,
                                    double t, double q, double Gamma) {
  require(u.cols() == 1, "check_gradient_bound: u must be a column field");
  require(u.grid().same_as(V.grid()),
          "check_gradient_bound: u and V must share a grid");
  require(ball.radius > 0.0, "check_gradient_bound: radius must be positive");
  require(Gamma >= 0.0, "check_gradient_bound: Gamma must be nonnegative");
  const double p = model.p();
  const double se = model.s_eff();
  const double R = ball.radius;
  const Ball half{ball.center, R / 2.0};
  VectorField Du = gradient(u);
  ScalarField mag = magnitude(Du);

  if (variant == GradientBoundVariant::general_growth) {
    require(model.kind() == ModelKind::GeneralGrowth,
            "check_gradient_bound: general_growth variant needs a "
            "general-growth model");
    ScalarField v(u.domain_ptr());
    for (std::int64_t pt : u.domain().members())
      v[pt] = model.h_of(mag[pt]) * mag[pt];
    const double lhs = sup_norm(v, half);
    const double avg = std::sqrt(ball_average(v, ball));
    const double pot = potential_sup(V, R, Ball{ball.center, R});
    return make_report(
        "gradient-bound-general-growth", lhs,
        {{"average", avg}, {"potential", std::sqrt(pot)}, {"unit", 1.0}}, cap);
  }

  const double tt = t > 0.0 ? t : p;
  ScalarField base(u.domain_ptr());
  for (std::int64_t pt : u.domain().members())
    base[pt] = std::pow(se + Gamma + mag[pt], tt);
  const double avg = std::pow(ball_average(base, ball), 1.0 / tt);
  const double lhs = sup_norm(Du, half);

  switch (variant) {
    case GradientBoundVariant::potential: {
      require(p > 1.0, "check_gradient_bound: potential variant needs p > 1");
      const double pot = potential_sup(V, R, Ball{ball.center, R});
      return make_report(
          "gradient-bound-potential", lhs,
          {{"average", avg}, {"potential", std::pow(pot, 1.0 / (p - 1.0))}},
          cap);
    }
    case GradientBoundVariant::critical:
      return make_report("gradient-bound-critical", lhs, {{"average", avg}},
                         cap);
    case GradientBoundVariant::subcritical: {
      require(q >= 0.0 && q < p - 1.0,
              "check_gradient_bound: subcritical variant needs 0 <= q < p-1");
      const double pot = potential_sup(V, R, Ball{ball.center, R});
      return make_report(
          "gradient-bound-subcritical", lhs,
          {{"average", avg},
           {"potential", std::pow(pot, 1.0 / (p - 1.0 - q))}},
          cap);
    }
    default:
      break;
  }
  require(false, "check_gradient_bound: unknown variant");
  return {};
}

EstimateReport check_lorentz_lipschitz(const VectorField& u, const Model& model,
                                       const ScalarField& V, const Ball& inner,
                                       const Ball& outer, double cap) {
  const Grid& g = u.grid();
  require(g.dim() == 3,
          "check_lorentz_lipschitz: three-dimensional fields required");
  require(u.grid().same_as(V.grid()),
          "check_lorentz_lipschitz: u and V must share a grid");
  require(inner.radius > 0.0 && outer.radius > 0.0,
          "check_lorentz_lipschitz: radii must be positive");
  require(dist(inner.center, outer.center, 3) + inner.radius <= outer.radius,
          "check_lorentz_lipschitz: inner ball must sit inside the outer one");
  const double p = model.p();
  VectorField Du = gradient(u);
  const double lhs = sup_norm(Du, inner);
  const double energy = lp_norm(Du, p, outer);

  ScalarField masked(V.domain_ptr());
  std::int64_t count = 0;
  for (std::int64_t pt : V.domain().members()) {
    if (dist(g.point(g.unflat(pt)), outer.center, 3) >= outer.radius) continue;
    masked[pt] = V[pt];
    ++count;
  }
  const double lorentz = lorentz_norm(rearrange(masked), 3.0, 1.0);
  const double measure = static_cast<double>(count) * g.cell_volume();
  const double degeneracy = model.s_eff() * std::pow(measure, 1.0 / p);
  return make_report("lorentz-lipschitz", lhs,
                     {{"gradient-energy", energy},
                      {"lorentz-datum", lorentz},
                      {"degeneracy", degeneracy}},
                     cap);
}

HodgeReport hodge_rigidity_check(const VectorField& w, double delta, double t) {
  require(t > 1.0, "hodge_rigidity_check: integrability t must exceed 1");
  require(delta > -1.0 && delta < t - 1.0,
          "hodge_rigidity_check: delta must lie in (-1, t-1)");
  require(w.cols() == 1, "hodge_rigidity_check: w must be a column field");
  const Domain& dom = w.domain();
  require(dom.is_full_box(),
          "hodge_rigidity_check: the splitting is defined on full boxes");
  double boundary_max = 0.0;
  for (std::int64_t p : dom.boundary_points())
    boundary_max = std::max(boundary_max, w.norm_at(p));
  require(boundary_max <= 1e-12 * (1.0 + sup_norm(w)),
          "hodge_rigidity_check: w must vanish on the boundary");

  const int N = w.rows();
  VectorField Gw = forward_gradient(w);
  VectorField F(w.domain_ptr(), N, Gw.cols());
  for (std::int64_t p : dom.members()) {
    const double m = Gw.norm_at(p);
    if (m <= 0.0) continue;
    const double factor = std::pow(m, delta);
    for (int c = 0; c < N * Gw.cols(); ++c)
      F.ptr(p)[c] = factor * Gw.ptr(p)[c];
  }

  // phi: zero-boundary Poisson solve against the backward divergence of F.
  // The quadratic member of the operator catalog is exactly the composed
  // five-point operator of the forward/backward difference pair on a box.
  VectorField rhs = backward_divergence_neg(F);
  DirichletProblem poisson{Model::p_laplace(dom.grid().dim(), N, 2.0, 1.0),
                           w.domain_ptr(), VectorField(w.domain_ptr(), N, 1),
                           VectorField(w.domain_ptr(), N, 1), BSpec{}};
  SolverOptions opt;
  opt.tol = 1e-11;
  opt.cg_tol = 1e-13;
  auto [phi, rep] = solve_dirichlet(poisson, rhs, opt);

  VectorField Gphi = forward_gradient(phi);
  VectorField H(w.domain_ptr(), N, Gw.cols());
  VectorField split_residual(w.domain_ptr(), N, Gw.cols());
  for (std::int64_t p : dom.members())
    for (int c = 0; c < N * Gw.cols(); ++c) {
      H.ptr(p)[c] = F.ptr(p)[c] - Gphi.ptr(p)[c];
      split_residual.ptr(p)[c] = F.ptr(p)[c] - Gphi.ptr(p)[c] - H.ptr(p)[c];
    }

  HodgeReport out;
  const double r = t / (1.0 + delta);
  out.h_norm = lp_norm(H, r);
  out.dphi_norm = lp_norm(Gphi, r);
  out.dw_norm = lp_norm(Gw, t);
  out.decomposition_residual = lp_norm(split_residual, 2.0);

  // Dual-norm of the divergence of H: test against the energy solution for
  // that datum, giving sqrt(<G^T H, z>) = the discrete negative-order norm.
  VectorField divH = backward_divergence_neg(H);
  auto [z, rep2] = solve_dirichlet(poisson, divH, opt);
  out.divergence_residual = std::sqrt(std::max(0.0, l2_inner(divH, z)));
  out.solver_converged = rep.converged && rep2.converged;

  if (delta != 0.0) {
    const double denom = std::fabs(delta) * std::pow(out.dw_norm, 1.0 + delta);
    if (denom > 0.0)
      out.rigidity_ratio = out.h_norm / denom;
    else
      out.rigidity_ratio =
          out.h_norm == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return out;
}

}  // namespace plpot
