#include "plpot/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace plpot {

namespace {

// Per-axis first derivative of one channel at member point ix.
double axis_derivative(const Domain& dom, const Grid& g,
                       const std::function<double(std::int64_t)>& val,
                       const Index& ix, int axis) {
  const double h = g.spacing();
  Index plus = ix, minus = ix;
  plus[axis] += 1;
  minus[axis] -= 1;
  const bool hasp = dom.inside(plus);
  const bool hasm = dom.inside(minus);
  if (hasp && hasm)
    return (val(g.flat(plus)) - val(g.flat(minus))) / (2.0 * h);
  if (hasp) {
    Index pp = plus;
    pp[axis] += 1;
    require(dom.inside(pp), "gradient: domain thinner than one-sided stencil");
    return (-3.0 * val(g.flat(ix)) + 4.0 * val(g.flat(plus)) - val(g.flat(pp))) /
           (2.0 * h);
  }
  if (hasm) {
    Index mm = minus;
    mm[axis] -= 1;
    require(dom.inside(mm), "gradient: domain thinner than one-sided stencil");
    return (3.0 * val(g.flat(ix)) - 4.0 * val(g.flat(minus)) + val(g.flat(mm))) /
           (2.0 * h);
  }
  throw Error("gradient: member point with no axis neighbours");
}

}  // namespace

VectorField gradient(const ScalarField& u) {
  const Grid& g = u.grid();
  VectorField out(u.domain_ptr(), 1, g.dim());
  const auto val = [&u](std::int64_t p) { return u[p]; };
  for (std::int64_t p : u.domain().members()) {
    const Index ix = g.unflat(p);
    for (int k = 0; k < g.dim(); ++k)
      out.at(p, 0, k) = axis_derivative(u.domain(), g, val, ix, k);
  }
  return out;
}

VectorField gradient(const VectorField& u) {
  require(u.cols() == 1, "gradient: expects a rows x 1 field");
  const Grid& g = u.grid();
  VectorField out(u.domain_ptr(), u.rows(), g.dim());
  for (int r = 0; r < u.rows(); ++r) {
    const auto val = [&u, r](std::int64_t p) { return u.at(p, r, 0); };
    for (std::int64_t p : u.domain().members()) {
      const Index ix = g.unflat(p);
      for (int k = 0; k < g.dim(); ++k)
        out.at(p, r, k) = axis_derivative(u.domain(), g, val, ix, k);
    }
  }
  return out;
}

ScalarField divergence(const VectorField& F) {
  require(F.rows() == 1 && F.cols() == F.grid().dim(),
          "divergence: expects a 1 x dim field");
  const Grid& g = F.grid();
  ScalarField out(F.domain_ptr());
  for (std::int64_t p : F.domain().members()) {
    const Index ix = g.unflat(p);
    double s = 0.0;
    for (int k = 0; k < g.dim(); ++k) {
      const auto val = [&F, k](std::int64_t q) { return F.at(q, 0, k); };
      s += axis_derivative(F.domain(), g, val, ix, k);
    }
    out[p] = s;
  }
  return out;
}

VectorField divergence_rows(const VectorField& F) {
  require(F.cols() == F.grid().dim(), "divergence_rows: expects rows x dim field");
  const Grid& g = F.grid();
  VectorField out(F.domain_ptr(), F.rows(), 1);
  for (int r = 0; r < F.rows(); ++r) {
    for (std::int64_t p : F.domain().members()) {
      const Index ix = g.unflat(p);
      double s = 0.0;
      for (int k = 0; k < g.dim(); ++k) {
        const auto val = [&F, r, k](std::int64_t q) { return F.at(q, r, k); };
        s += axis_derivative(F.domain(), g, val, ix, k);
      }
      out.at(p, r, 0) = s;
    }
  }
  return out;
}

namespace {

template <class NormAt>
double ball_reduce_sum(const Domain& dom, const Ball& ball, NormAt f,
                       std::int64_t* count_out) {
  const Grid& g = dom.grid();
  Index lo{0, 0, 0}, hi{0, 0, 0};
  for (int k = 0; k < g.dim(); ++k) {
    lo[k] = std::max(0, static_cast<int>(std::ceil((ball.center[k] - ball.radius - g.origin()[k]) / g.spacing())));
    hi[k] = std::min(g.shape()[k] - 1,
                     static_cast<int>(std::floor((ball.center[k] + ball.radius - g.origin()[k]) / g.spacing())));
  }
  if (g.dim() == 2) {
    lo[2] = hi[2] = 0;
  }
  double sum = 0.0;
  std::int64_t count = 0;
  Index ix;
  for (ix[0] = lo[0]; ix[0] <= hi[0]; ++ix[0])
    for (ix[1] = lo[1]; ix[1] <= hi[1]; ++ix[1])
      for (ix[2] = lo[2]; ix[2] <= hi[2]; ++ix[2]) {
        const std::int64_t p = g.flat(ix);
        if (!dom.inside(p)) continue;
        if (dist(g.point(ix), ball.center, g.dim()) >= ball.radius) continue;
        sum += f(p);
        ++count;
      }
  if (count_out) *count_out = count;
  return sum;
}

}  // namespace

double ball_integral(const ScalarField& f, const Ball& ball) {
  require(ball.radius > 0.0, "ball_integral: radius must be positive");
  std::int64_t count = 0;
  const double s =
      ball_reduce_sum(f.domain(), ball, [&f](std::int64_t p) { return f[p]; }, &count);
  return s * f.grid().cell_volume();
}

std::int64_t ball_member_count(const ScalarField& f, const Ball& ball) {
  std::int64_t count = 0;
  ball_reduce_sum(f.domain(), ball, [](std::int64_t) { return 0.0; }, &count);
  return count;
}

double ball_average(const ScalarField& f, const Ball& ball) {
  require(ball.radius > 0.0, "ball_average: radius must be positive");
  std::int64_t count = 0;
  const double s =
      ball_reduce_sum(f.domain(), ball, [&f](std::int64_t p) { return f[p]; }, &count);
  require(count > 0, "ball_average: ball contains no domain cell");
  return s / static_cast<double>(count);
}

namespace {

template <class MagAt>
double lp_impl(const Domain& dom, double t, const std::optional<Ball>& region,
               MagAt mag, double cellvol) {
  require(t > 0.0, "lp_norm: exponent must be positive");
  const bool is_sup = std::isinf(t);
  double acc = 0.0;
  const auto visit = [&](std::int64_t p) {
    const double m = mag(p);
    if (is_sup)
      acc = std::max(acc, m);
    else
      acc += std::pow(m, t);
  };
  if (region) {
    ball_reduce_sum(dom, *region, [&](std::int64_t p) { visit(p); return 0.0; }, nullptr);
  } else {
    for (std::int64_t p : dom.members()) visit(p);
  }
  if (is_sup) return acc;
  return std::pow(acc * cellvol, 1.0 / t);
}

}  // namespace

double lp_norm(const ScalarField& f, double t, const std::optional<Ball>& region) {
  return lp_impl(f.domain(), t, region,
                 [&f](std::int64_t p) { return std::abs(f[p]); },
                 f.grid().cell_volume());
}

double lp_norm(const VectorField& F, double t, const std::optional<Ball>& region) {
  return lp_impl(F.domain(), t, region,
                 [&F](std::int64_t p) { return F.norm_at(p); },
                 F.grid().cell_volume());
}

double sup_norm(const ScalarField& f, const std::optional<Ball>& region) {
  return lp_norm(f, std::numeric_limits<double>::infinity(), region);
}

double sup_norm(const VectorField& F, const std::optional<Ball>& region) {
  return lp_norm(F, std::numeric_limits<double>::infinity(), region);
}

double l2_inner(const ScalarField& f, const ScalarField& g) {
  require(f.grid().same_as(g.grid()), "l2_inner: grid mismatch");
  double s = 0.0;
  for (std::int64_t p : f.domain().members()) s += f[p] * g[p];
  return s * f.grid().cell_volume();
}

double l2_inner(const VectorField& F, const VectorField& G) {
  require(F.grid().same_as(G.grid()) && F.channels() == G.channels(),
          "l2_inner: field mismatch");
  double s = 0.0;
  for (std::int64_t p : F.domain().members()) {
    const double* a = F.ptr(p);
    const double* b = G.ptr(p);
    for (int c = 0; c < F.channels(); ++c) s += a[c] * b[c];
  }
  return s * F.grid().cell_volume();
}

}  // namespace plpot
