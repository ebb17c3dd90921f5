#include "plpot/solver.hpp"

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <memory>

#include "fftw_mutex.hpp"
#include "plpot/calculus.hpp"
#include "plpot/error.hpp"
#include "plpot/potentials.hpp"

namespace plpot {

namespace {

// One corner cell: a base point whose axis neighbours in the chosen sign
// pattern are all members. The 2^dim patterns per point tile the energy with
// weight 2^-dim each; on box domains every interior edge ends up with full
// weight, which is what makes p = 2 reproduce the standard Laplacian stencil.
struct CornerCell {
  std::int64_t base = 0;
  std::array<std::int64_t, 3> nb{0, 0, 0};
  std::array<double, 3> sign{0.0, 0.0, 0.0};
};

struct Assembly {
  const Domain* dom = nullptr;
  const Model* model = nullptr;
  int dim = 2, N = 1, zdim = 2;
  double h = 0.0, hn = 0.0, w = 0.25;
  std::vector<CornerCell> cells;
  std::vector<std::int64_t> interior;
  std::vector<std::int32_t> dof;  // flat point -> dof id, -1 outside
  std::int64_t ndof = 0;
};

Assembly build_assembly(const Domain& dom, const Model& model) {
  Assembly as;
  as.dom = &dom;
  as.model = &model;
  const Grid& g = dom.grid();
  as.dim = g.dim();
  as.N = model.N();
  as.zdim = as.N * as.dim;
  as.h = g.spacing();
  as.hn = g.cell_volume();
  as.w = 1.0 / double(1 << as.dim);
  require(model.dim() == as.dim, "solver: model dimension does not match grid");

  const int nmask = 1 << as.dim;
  as.cells.reserve(dom.members().size() * size_t(nmask));
  for (std::int64_t p : dom.members()) {
    Index ix = g.unflat(p);
    for (int mask = 0; mask < nmask; ++mask) {
      CornerCell c;
      c.base = p;
      bool ok = true;
      for (int k = 0; k < as.dim; ++k) {
        int s = (mask >> k) & 1 ? 1 : -1;
        Index jx = ix;
        jx[k] += s;
        if (!dom.inside(jx)) {
          ok = false;
          break;
        }
        c.nb[size_t(k)] = g.flat(jx);
        c.sign[size_t(k)] = double(s);
      }
      if (ok) as.cells.push_back(c);
    }
  }

  as.interior = dom.interior_points();
  as.dof.assign(size_t(g.npoints()), -1);
  for (size_t i = 0; i < as.interior.size(); ++i)
    as.dof[size_t(as.interior[i])] = std::int32_t(i);
  as.ndof = std::int64_t(as.interior.size()) * as.N;
  require(as.ndof > 0, "solver: domain has no interior unknowns");
  return as;
}

inline void cell_grad(const Assembly& as, const VectorField& u,
                      const CornerCell& c, double* g) {
  const double* ub = u.ptr(c.base);
  for (int k = 0; k < as.dim; ++k) {
    const double* un = u.ptr(c.nb[size_t(k)]);
    double sh = c.sign[size_t(k)] / as.h;
    for (int r = 0; r < as.N; ++r) g[r * as.dim + k] = sh * (un[r] - ub[r]);
  }
}

double total_energy(const Assembly& as, const VectorField& u,
                    const VectorField& f) {
  std::vector<double> g(size_t(as.zdim));
  double F = 0.0;
  for (const CornerCell& c : as.cells) {
    cell_grad(as, u, c, g.data());
    F += as.model->energy_density(g.data());
  }
  F *= as.w;
  double fu = 0.0;
  for (std::int64_t p : as.interior) {
    const double* fp = f.ptr(p);
    const double* up = u.ptr(p);
    for (int r = 0; r < as.N; ++r) fu += fp[r] * up[r];
  }
  return as.hn * (F - fu);
}

// Gradient of the energy density functional: the discrete -div a(Du) - f at
// the interior unknowns.
void residual(const Assembly& as, const VectorField& u, const VectorField& f,
              std::vector<double>& res) {
  res.assign(size_t(as.ndof), 0.0);
  std::vector<double> g(size_t(as.zdim)), av(size_t(as.zdim));
  for (const CornerCell& c : as.cells) {
    std::int32_t db = as.dof[size_t(c.base)];
    bool touches = db >= 0;
    for (int k = 0; !touches && k < as.dim; ++k)
      touches = as.dof[size_t(c.nb[size_t(k)])] >= 0;
    if (!touches) continue;
    cell_grad(as, u, c, g.data());
    as.model->a_eval(g.data(), av.data());
    for (int k = 0; k < as.dim; ++k) {
      std::int32_t dn = as.dof[size_t(c.nb[size_t(k)])];
      double sh = c.sign[size_t(k)] * as.w / as.h;
      for (int r = 0; r < as.N; ++r) {
        double val = av[r * as.dim + k] * sh;
        if (dn >= 0) res[size_t(dn) * as.N + r] += val;
        if (db >= 0) res[size_t(db) * as.N + r] -= val;
      }
    }
  }
  for (size_t i = 0; i < as.interior.size(); ++i) {
    const double* fp = f.ptr(as.interior[i]);
    for (int r = 0; r < as.N; ++r) res[i * size_t(as.N) + r] -= fp[r];
  }
}

double dof_norm(const Assembly& as, const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s * as.hn);
}

// Per-cell derivative matrices, cached when they fit comfortably in memory.
bool build_b_cache(const Assembly& as, const VectorField& u,
                   std::vector<double>& cache) {
  size_t bsz = size_t(as.zdim) * size_t(as.zdim);
  if (as.cells.size() * bsz > size_t(3e7)) {
    cache.clear();
    return false;
  }
  cache.resize(as.cells.size() * bsz);
  std::vector<double> g(size_t(as.zdim));
  for (size_t ci = 0; ci < as.cells.size(); ++ci) {
    cell_grad(as, u, as.cells[ci], g.data());
    as.model->a_derivative(g.data(), cache.data() + ci * bsz);
  }
  return true;
}

void hessian_apply(const Assembly& as, const VectorField& u,
                   const std::vector<double>& Bcache,
                   const std::vector<double>& v, std::vector<double>& out) {
  out.assign(size_t(as.ndof), 0.0);
  std::vector<double> gv(size_t(as.zdim)), Bg(size_t(as.zdim)),
      g(size_t(as.zdim)), Bloc(size_t(as.zdim) * as.zdim);
  size_t bsz = size_t(as.zdim) * size_t(as.zdim);
  for (size_t ci = 0; ci < as.cells.size(); ++ci) {
    const CornerCell& c = as.cells[ci];
    std::int32_t db = as.dof[size_t(c.base)];
    bool touches = db >= 0;
    for (int k = 0; !touches && k < as.dim; ++k)
      touches = as.dof[size_t(c.nb[size_t(k)])] >= 0;
    if (!touches) continue;

    for (int k = 0; k < as.dim; ++k) {
      std::int32_t dn = as.dof[size_t(c.nb[size_t(k)])];
      double sh = c.sign[size_t(k)] / as.h;
      for (int r = 0; r < as.N; ++r) {
        double vn = dn >= 0 ? v[size_t(dn) * as.N + r] : 0.0;
        double vb = db >= 0 ? v[size_t(db) * as.N + r] : 0.0;
        gv[size_t(r * as.dim + k)] = sh * (vn - vb);
      }
    }
    const double* B;
    if (!Bcache.empty()) {
      B = Bcache.data() + ci * bsz;
    } else {
      cell_grad(as, u, c, g.data());
      as.model->a_derivative(g.data(), Bloc.data());
      B = Bloc.data();
    }
    for (int a = 0; a < as.zdim; ++a) {
      double s = 0.0;
      for (int b = 0; b < as.zdim; ++b) s += B[a * as.zdim + b] * gv[size_t(b)];
      Bg[size_t(a)] = s;
    }
    for (int k = 0; k < as.dim; ++k) {
      std::int32_t dn = as.dof[size_t(c.nb[size_t(k)])];
      double sh = c.sign[size_t(k)] * as.w / as.h;
      for (int r = 0; r < as.N; ++r) {
        double val = Bg[size_t(r * as.dim + k)] * sh;
        if (dn >= 0) out[size_t(dn) * as.N + r] += val;
        if (db >= 0) out[size_t(db) * as.N + r] -= val;
      }
    }
  }
}

struct Precond {
  virtual ~Precond() = default;
  virtual void apply(const std::vector<double>& r, std::vector<double>& z) const = 0;
};

struct JacobiPrecond : Precond {
  std::vector<double> inv_diag;
  void apply(const std::vector<double>& r, std::vector<double>& z) const override {
    z.resize(r.size());
    for (size_t i = 0; i < r.size(); ++i) z[i] = r[i] * inv_diag[i];
  }
};

// Exact inverse of alpha * (discrete Dirichlet Laplacian) on the interior
// block of a box domain, via the sine transform. At p = 2 this inverts the
// Hessian itself; away from p = 2 it equalizes the spectrum enough to keep
// conjugate-gradient counts grid-independent.
struct DstPrecond : Precond {
  int dim = 2, N = 1;
  int m[3] = {1, 1, 1};
  std::int64_t nblk = 0;
  double* buf = nullptr;
  fftw_plan plan = nullptr;  // RODFT00 is its own inverse up to scaling
  std::vector<double> inv_lambda;  // includes the transform normalization

  ~DstPrecond() override {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    if (plan) fftw_destroy_plan(plan);
    if (buf) fftw_free(buf);
  }

  void apply(const std::vector<double>& r, std::vector<double>& z) const override {
    z.resize(r.size());
    for (int comp = 0; comp < N; ++comp) {
      for (std::int64_t i = 0; i < nblk; ++i) buf[i] = r[size_t(i) * N + comp];
      fftw_execute(plan);
      for (std::int64_t i = 0; i < nblk; ++i) buf[i] *= inv_lambda[size_t(i)];
      fftw_execute(plan);
      for (std::int64_t i = 0; i < nblk; ++i) z[size_t(i) * N + comp] = buf[i];
    }
  }
};

// Builds the sine-transform preconditioner when the interior is a contiguous
// box block in dof order; returns nullptr otherwise.
std::unique_ptr<Precond> try_dst(const Assembly& as, double alpha) {
  if (!as.dom->is_full_box() || alpha <= 0.0 || !std::isfinite(alpha))
    return nullptr;
  const Grid& g = as.dom->grid();
  auto dst = std::make_unique<DstPrecond>();
  dst->dim = as.dim;
  dst->N = as.N;
  std::int64_t nblk = 1;
  for (int k = 0; k < as.dim; ++k) {
    dst->m[k] = g.shape()[k] - 2;
    if (dst->m[k] < 1) return nullptr;
    nblk *= dst->m[k];
  }
  dst->nblk = nblk;
  if (std::int64_t(as.interior.size()) != nblk) return nullptr;
  Index first{1, 1, as.dim == 3 ? 1 : 0};
  Index last{g.shape()[0] - 2, g.shape()[1] - 2, as.dim == 3 ? g.shape()[2] - 2 : 0};
  if (as.interior.front() != g.flat(first) || as.interior.back() != g.flat(last))
    return nullptr;

  dst->buf = fftw_alloc_real(size_t(nblk));
  require(dst->buf != nullptr, "solver: preconditioner allocation failed");
  {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    if (as.dim == 2)
      dst->plan = fftw_plan_r2r_2d(dst->m[0], dst->m[1], dst->buf, dst->buf,
                                   FFTW_RODFT00, FFTW_RODFT00, FFTW_ESTIMATE);
    else
      dst->plan = fftw_plan_r2r_3d(dst->m[0], dst->m[1], dst->m[2], dst->buf,
                                   dst->buf, FFTW_RODFT00, FFTW_RODFT00,
                                   FFTW_RODFT00, FFTW_ESTIMATE);
  }
  if (!dst->plan) return nullptr;

  double norm = 1.0;
  for (int k = 0; k < as.dim; ++k) norm *= 2.0 * (dst->m[k] + 1);
  const double pi = 3.14159265358979323846;
  dst->inv_lambda.resize(size_t(nblk));
  std::int64_t idx = 0;
  int m2 = as.dim == 3 ? dst->m[2] : 1;
  for (int k0 = 0; k0 < dst->m[0]; ++k0)
    for (int k1 = 0; k1 < dst->m[1]; ++k1)
      for (int k2 = 0; k2 < m2; ++k2) {
        double lam = 2.0 - 2.0 * std::cos(pi * (k0 + 1) / (dst->m[0] + 1)) +
                     2.0 - 2.0 * std::cos(pi * (k1 + 1) / (dst->m[1] + 1));
        if (as.dim == 3)
          lam += 2.0 - 2.0 * std::cos(pi * (k2 + 1) / (dst->m[2] + 1));
        lam *= alpha / (as.h * as.h);
        dst->inv_lambda[size_t(idx++)] = 1.0 / (lam * norm);
      }
  return dst;
}

std::unique_ptr<Precond> make_jacobi(const Assembly& as,
                                     const std::vector<double>& Bcache,
                                     const VectorField& u) {
  auto jac = std::make_unique<JacobiPrecond>();
  std::vector<double> diag(size_t(as.ndof), 0.0);
  std::vector<double> g(size_t(as.zdim)), Bloc(size_t(as.zdim) * as.zdim);
  size_t bsz = size_t(as.zdim) * size_t(as.zdim);
  double h2 = as.h * as.h;
  for (size_t ci = 0; ci < as.cells.size(); ++ci) {
    const CornerCell& c = as.cells[ci];
    const double* B;
    if (!Bcache.empty()) {
      B = Bcache.data() + ci * bsz;
    } else {
      cell_grad(as, u, c, g.data());
      as.model->a_derivative(g.data(), Bloc.data());
      B = Bloc.data();
    }
    std::int32_t db = as.dof[size_t(c.base)];
    for (int k = 0; k < as.dim; ++k) {
      std::int32_t dn = as.dof[size_t(c.nb[size_t(k)])];
      for (int r = 0; r < as.N; ++r) {
        int a = r * as.dim + k;
        double d = as.w * B[a * as.zdim + a] / h2;
        if (dn >= 0) diag[size_t(dn) * as.N + r] += d;
        if (db >= 0) diag[size_t(db) * as.N + r] += d;
      }
    }
  }
  jac->inv_diag.resize(size_t(as.ndof));
  for (std::int64_t i = 0; i < as.ndof; ++i)
    jac->inv_diag[size_t(i)] = diag[size_t(i)] > 0.0 ? 1.0 / diag[size_t(i)] : 1.0;
  return jac;
}

double mean_trace_alpha(const Assembly& as, const std::vector<double>& Bcache,
                        const VectorField& u) {
  std::vector<double> g(size_t(as.zdim)), Bloc(size_t(as.zdim) * as.zdim);
  size_t bsz = size_t(as.zdim) * size_t(as.zdim);
  double tr = 0.0;
  for (size_t ci = 0; ci < as.cells.size(); ++ci) {
    const double* B;
    if (!Bcache.empty()) {
      B = Bcache.data() + ci * bsz;
    } else {
      cell_grad(as, u, as.cells[ci], g.data());
      as.model->a_derivative(g.data(), Bloc.data());
      B = Bloc.data();
    }
    for (int a = 0; a < as.zdim; ++a) tr += B[a * as.zdim + a];
  }
  return tr / (double(as.cells.size()) * as.zdim);
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Preconditioned conjugate gradient on the (SPD) linearized operator.
int pcg_solve(const Assembly& as, const VectorField& u,
              const std::vector<double>& Bcache, const Precond& pre,
              const std::vector<double>& rhs, std::vector<double>& x,
              double rel_tol, int max_iter) {
  x.assign(rhs.size(), 0.0);
  std::vector<double> r = rhs, z, p, Hp;
  double rn0 = std::sqrt(dot(r, r));
  if (rn0 == 0.0) return 0;
  pre.apply(r, z);
  p = z;
  double rz = dot(r, z);
  int it = 0;
  for (; it < max_iter; ++it) {
    hessian_apply(as, u, Bcache, p, Hp);
    double pHp = dot(p, Hp);
    if (pHp <= 0.0 || !std::isfinite(pHp)) break;
    double alpha = rz / pHp;
    for (size_t i = 0; i < x.size(); ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * Hp[i];
    }
    if (std::sqrt(dot(r, r)) <= rel_tol * rn0) {
      ++it;
      break;
    }
    pre.apply(r, z);
    double rz_new = dot(r, z);
    double beta = rz_new / rz;
    rz = rz_new;
    for (size_t i = 0; i < p.size(); ++i) p[i] = z[i] + beta * p[i];
  }
  return it;
}

void enforce_boundary(const Domain& dom, const VectorField& boundary,
                      VectorField& u) {
  int N = u.rows();
  for (std::int64_t p : dom.boundary_points()) {
    const double* src = boundary.ptr(p);
    double* dst = u.ptr(p);
    for (int r = 0; r < N; ++r) dst[r] = src[r];
  }
}

VectorField grad_difference(const VectorField& a, const VectorField& b) {
  VectorField d(a.domain_ptr(), a.rows(), a.cols());
  const std::vector<double>& av = a.raw();
  const std::vector<double>& bv = b.raw();
  std::vector<double>& dv = d.raw();
  for (size_t i = 0; i < dv.size(); ++i) dv[i] = av[i] - bv[i];
  return d;
}

}  // namespace

double b_formula(const BSpec& b, double grad_norm) {
  switch (b.kind) {
    case BKind::power:
      return b.q == 0.0 ? 1.0 : std::pow(b.Gamma + grad_norm, b.q);
    case BKind::plain_power:
      return b.q == 0.0 ? 1.0 : std::pow(grad_norm, b.q);
    case BKind::one:
      return 1.0;
    case BKind::zero:
      return 0.0;
  }
  return 0.0;
}

VectorField truncate_V(const VectorField& V, double eps) {
  require(eps > 0.0, "truncate_V: eps must be positive");
  VectorField out = V;
  double cap = 1.0 / eps;
  std::vector<double>& v = out.raw();
  for (double& x : v) x = std::clamp(x, -cap, cap);
  return out;
}

double truncate_b(double b, double eps) {
  require(eps >= 0.0, "truncate_b: eps must be nonnegative");
  return b / (1.0 + eps * std::fabs(b));
}

std::pair<VectorField, SolveReport> solve_dirichlet(const DirichletProblem& prob,
                                                    const VectorField& f,
                                                    const SolverOptions& opt,
                                                    const VectorField* init) {
  const Model& model = prob.model;
  require(model.s_eff() > 0.0,
          "solve_dirichlet: model must carry a positive degeneracy offset");
  require(prob.domain != nullptr, "solve_dirichlet: missing domain");
  require(prob.boundary.rows() == model.N() && prob.boundary.cols() == 1,
          "solve_dirichlet: boundary field shape mismatch");
  require(f.rows() == model.N() && f.cols() == 1,
          "solve_dirichlet: right-hand side shape mismatch");
  require(prob.boundary.grid().same_as(prob.domain->grid()) &&
              f.grid().same_as(prob.domain->grid()),
          "solve_dirichlet: fields live on a different grid");

  Assembly as = build_assembly(*prob.domain, model);
  SolveReport rep;
  rep.eps = model.eps();
  rep.truncation_level = model.eps() > 0.0 ? 1.0 / model.eps() : 0.0;

  VectorField u = init ? *init : prob.boundary;
  require(u.grid().same_as(prob.domain->grid()) && u.rows() == model.N(),
          "solve_dirichlet: initial guess shape mismatch");
  enforce_boundary(*prob.domain, prob.boundary, u);

  {
    double s = 0.0;
    for (std::int64_t p : as.interior) {
      const double* fp = f.ptr(p);
      for (int r = 0; r < as.N; ++r) s += fp[r] * fp[r];
    }
    rep.rhs_norm = std::sqrt(s * as.hn);
  }

  int max_cg = opt.max_cg > 0
                   ? opt.max_cg
                   : int(std::min<std::int64_t>(as.ndof, 20000));
  double E = total_energy(as, u, f);
  rep.energy_trace.push_back(E);

  std::vector<double> res, Bcache, delta, rhs;
  VectorField u_try = u;
  int flat_streak = 0;  // accepted steps without resolvable energy decrease
  for (int it = 0; it <= opt.max_newton; ++it) {
    residual(as, u, f, res);
    rep.final_residual = dof_norm(as, res);
    if (rep.final_residual <= opt.tol * (1.0 + rep.rhs_norm)) {
      rep.converged = true;
      break;
    }
    if (it == opt.max_newton || flat_streak >= 5) break;

    build_b_cache(as, u, Bcache);
    std::unique_ptr<Precond> pre = try_dst(as, mean_trace_alpha(as, Bcache, u));
    rep.preconditioner = pre ? "sine-transform" : "diagonal";
    if (!pre) pre = make_jacobi(as, Bcache, u);

    rhs.resize(res.size());
    for (size_t i = 0; i < res.size(); ++i) rhs[i] = -res[i];
    rep.cg_iterations +=
        pcg_solve(as, u, Bcache, *pre, rhs, delta, opt.cg_tol, max_cg);

    double gTd = 0.0;
    for (size_t i = 0; i < res.size(); ++i) gTd += res[i] * delta[i];
    gTd *= as.hn;
    if (!(gTd < 0.0)) {  // stalled linear solve: fall back to steepest descent
      delta = rhs;
      gTd = -dot(res, res) * as.hn;
      if (gTd == 0.0) {
        rep.converged = true;
        break;
      }
    }

    // Sufficient decrease with a machine-precision allowance: once the
    // predicted decrease falls below the energy's resolution, a full step is
    // accepted on the strength of the (consistent) linearization alone.
    double fuzz = 1e-14 * (std::fabs(E) + 1.0e-300);
    double t = 1.0;
    double E_new = E;
    while (true) {
      u_try.raw() = u.raw();
      for (size_t i = 0; i < as.interior.size(); ++i) {
        double* dst = u_try.ptr(as.interior[i]);
        for (int r = 0; r < as.N; ++r)
          dst[r] += t * delta[i * size_t(as.N) + r];
      }
      E_new = total_energy(as, u_try, f);
      if (E_new <= E + 1e-4 * t * gTd + fuzz) break;
      t *= 0.5;
      if (t < 1e-12) break;
    }
    if (t < 1e-12 && E_new > E + fuzz) break;  // line search stall: report as is

    flat_streak = E - E_new <= fuzz ? flat_streak + 1 : 0;
    u.raw() = u_try.raw();
    E = std::min(E, E_new);
    rep.energy_trace.push_back(E);
    ++rep.newton_iterations;
  }
  return {std::move(u), rep};
}

std::pair<VectorField, SolveReport> fixed_point_solve(const DirichletProblem& prob,
                                                      const SolverOptions& opt) {
  const Model& base = prob.model;
  require(prob.domain != nullptr, "fixed_point_solve: missing domain");
  require(prob.b.q >= 0.0 && prob.b.q <= base.p() - 1.0,
          "fixed_point_solve: growth exponent must lie in [0, p-1]");
  require(opt.eps_start >= opt.eps_final && opt.eps_final > 0.0,
          "fixed_point_solve: eps schedule must decrease to a positive floor");
  require(prob.V.rows() == base.N() && prob.V.cols() == 1,
          "fixed_point_solve: datum shape mismatch");

  SolveReport rep;
  VectorField u = prob.boundary;
  VectorField Du = gradient(u);
  double prev_gnorm = lp_norm(Du, base.p());
  int grow_streak = 0;
  bool out_of_budget = false;

  double eps = opt.eps_start;
  while (true) {
    Model meps = base.with_regularization(eps);
    VectorField Veps = truncate_V(prob.V, eps);
    DirichletProblem stage = prob;
    stage.model = meps;
    rep.eps = eps;
    rep.truncation_level = 1.0 / eps;

    bool stage_converged = false;
    while (rep.picard_iterations < opt.max_picard) {
      VectorField f(prob.domain, base.N(), 1);
      for (std::int64_t p : prob.domain->members()) {
        double bval = truncate_b(b_formula(prob.b, Du.norm_at(p)), eps);
        const double* vp = Veps.ptr(p);
        double* fp = f.ptr(p);
        for (int r = 0; r < base.N(); ++r) fp[r] = bval * vp[r];
      }
      auto [u_next, inner] = solve_dirichlet(stage, f, opt, &u);
      rep.newton_iterations += inner.newton_iterations;
      rep.cg_iterations += inner.cg_iterations;
      rep.final_residual = inner.final_residual;
      rep.converged = inner.converged;
      rep.rhs_norm = inner.rhs_norm;
      if (!inner.preconditioner.empty()) rep.preconditioner = inner.preconditioner;
      for (double e : inner.energy_trace) rep.energy_trace.push_back(e);

      VectorField Du_next = gradient(u_next);
      double inc = lp_norm(grad_difference(Du_next, Du), base.p());
      rep.picard_increments.push_back(inc);
      ++rep.picard_iterations;

      double gnorm = lp_norm(Du_next, base.p());
      if (gnorm > opt.divergence_cap && gnorm > prev_gnorm)
        ++grow_streak;
      else
        grow_streak = 0;
      prev_gnorm = gnorm;
      u = std::move(u_next);
      Du = std::move(Du_next);
      if (grow_streak >= 5) {
        rep.diverged = true;
        rep.converged = false;
        return {std::move(u), rep};
      }
      if (inc <= opt.picard_tol * (1.0 + gnorm)) {
        stage_converged = true;
        break;
      }
    }
    if (!stage_converged) {
      out_of_budget = true;
      break;
    }
    if (eps <= opt.eps_final) break;
    eps = std::max(0.5 * eps, opt.eps_final);
  }
  if (out_of_budget) rep.converged = false;

  {  // median ratio of successive increments, where meaningful
    std::vector<double> ratios;
    const std::vector<double>& inc = rep.picard_increments;
    for (size_t i = 1; i < inc.size(); ++i)
      if (inc[i - 1] > 0.0 && inc[i] > 0.0) ratios.push_back(inc[i] / inc[i - 1]);
    if (!ratios.empty()) {
      std::sort(ratios.begin(), ratios.end());
      rep.contraction_factor = ratios[ratios.size() / 2];
    }
  }

  if (std::fabs(prob.b.q - (base.p() - 1.0)) < 1e-12) {
    ScalarField vmag = magnitude(prob.V);
    const Grid& g = prob.domain->grid();
    rep.v_ln_norm = lp_norm(vmag, double(g.dim()));
    double R = opt.smallness_radius;
    if (R <= 0.0) {
      R = g.length(0);
      for (int k = 1; k < g.dim(); ++k) R = std::min(R, g.length(k));
      R *= 0.25;
    }
    rep.sup_potential = potential_sup(vmag, R);
    rep.critical_label = (rep.v_ln_norm < opt.critical_c0 &&
                          rep.sup_potential <= opt.critical_eps0)
                             ? "critical-small"
                             : "critical-unverified";
  }
  return {std::move(u), rep};
}

CoercivityReport coercivity_check(const DirichletProblem& prob,
                                  const std::vector<double>& eps_family,
                                  const SolverOptions& opt) {
  require(!eps_family.empty(), "coercivity_check: empty regularization family");
  CoercivityReport rep;
  const Grid& g = prob.domain->grid();
  ScalarField vmag = magnitude(prob.V);
  double v_ln = lp_norm(vmag, double(g.dim()));
  double vn_term = std::pow(v_ln, double(g.dim()));

  for (double eps : eps_family) {
    SolverOptions stage_opt = opt;
    stage_opt.eps_start = stage_opt.eps_final = eps;
    auto [u, srep] = fixed_point_solve(prob, stage_opt);
    VectorField Du = gradient(u);
    VectorField Veps = truncate_V(prob.V, eps);

    double mass = 0.0, follows = 0.0;
    for (std::int64_t p : prob.domain->members()) {
      double gn = Du.norm_at(p);
      mass += std::pow(gn, prob.b.q) * Veps.norm_at(p);
      follows += std::pow(1.0 + prob.b.Gamma + gn, prob.model.p());
    }
    mass *= g.cell_volume();
    follows = follows * g.cell_volume() + vn_term;

    rep.eps.push_back(eps);
    rep.grad_p_norm.push_back(lp_norm(Du, prob.model.p()));
    rep.rhs_mass.push_back(mass);
    rep.follows_bound.push_back(follows);
  }

  bool increasing = true;
  for (size_t i = 1; i < rep.grad_p_norm.size(); ++i)
    if (rep.grad_p_norm[i] <= rep.grad_p_norm[i - 1]) increasing = false;
  rep.blowup = increasing && rep.grad_p_norm.size() > 1 &&
               rep.grad_p_norm.back() > 2.0 * rep.grad_p_norm.front();
  return rep;
}

}  // namespace plpot
