#include "plpot/potentials.hpp"

#include <algorithm>
#include <cmath>

#include "plpot/ballsum.hpp"
#include "plpot/calculus.hpp"
#include "plpot/error.hpp"
#include "plpot/lorentz.hpp"
#include "plpot/parallel.hpp"
#include "plpot/quadrature.hpp"

namespace plpot {

namespace {

// Kernel parameters of the generic radius integral
//   int (M(rho) / rho^kpow)^inv drho/rho,
// where M is the counting ball measure of a nonnegative density.
struct RadiusKernel {
  double inv;   // outer exponent
  double kpow;  // kernel power of rho
  int n;        // ambient dimension
  double e() const { return -kpow * inv; }            // panel exponent
  double g() const { return (n - kpow) * inv; }       // sub-cell exponent
};

RadiusKernel p_kernel(int n) { return RadiusKernel{0.5, double(n - 2), n}; }

// Sorted cell distances and prefix masses around one center.
struct CenterProfile {
  std::vector<double> d;       // sorted distances of member cells with d < build_R
  std::vector<double> prefix;  // prefix[k] = mass of the first k cells
  double center_density = 0.0;
};

CenterProfile build_center_profile(const ScalarField& density, const Point& x,
                                   double build_R) {
  const Grid& g = density.grid();
  const Domain& dom = density.domain();
  const double h = g.spacing();
  const double hn = g.cell_volume();
  const int dim = g.dim();

  Index lo{0, 0, 0}, hi{0, 0, 0};
  for (int k = 0; k < dim; ++k) {
    lo[k] = std::max(0, int(std::ceil((x[k] - build_R - g.origin()[k]) / h)));
    hi[k] = std::min(g.shape()[k] - 1,
                     int(std::floor((x[k] + build_R - g.origin()[k]) / h)));
  }
  const int k_lo = (dim == 3) ? lo[2] : 0, k_hi = (dim == 3) ? hi[2] : 0;

  std::vector<std::pair<double, double>> cells;  // (distance, mass)
  for (int i = lo[0]; i <= hi[0]; ++i)
    for (int j = lo[1]; j <= hi[1]; ++j)
      for (int k = k_lo; k <= k_hi; ++k) {
        std::int64_t p = g.flat(i, j, k);
        if (!dom.inside(p)) continue;
        double dd = dist(g.point(p), x, dim);
        if (dd < build_R) cells.emplace_back(dd, density[p] * hn);
      }
  std::sort(cells.begin(), cells.end());

  CenterProfile prof;
  prof.d.reserve(cells.size());
  prof.prefix.reserve(cells.size() + 1);
  prof.prefix.push_back(0.0);
  double acc = 0.0;
  for (auto& c : cells) {
    prof.d.push_back(c.first);
    acc += c.second;
    prof.prefix.push_back(acc);
  }
  Index nearest = g.nearest(x);
  std::int64_t np = g.flat(nearest);
  if (dom.inside(np)) prof.center_density = density[np];
  return prof;
}

// M(rho) = mass of cells with d < rho.
double profile_mass(const CenterProfile& prof, double rho) {
  size_t k = size_t(std::lower_bound(prof.d.begin(), prof.d.end(), rho) -
                    prof.d.begin());
  return prof.prefix[k];
}

double subcell_term(const RadiusKernel& ker, double density_at_center,
                    double h, double R) {
  if (density_at_center <= 0.0) return 0.0;
  double up = std::min(h, R);
  double g = ker.g();
  return std::pow(density_at_center * unit_ball_volume(ker.n), ker.inv) *
         std::pow(up, g) / g;
}

// Exact integral over [h, R] of (M/rho^kpow)^inv drho/rho on the counting
// measure: M is constant between consecutive distances, each panel closes.
double counting_integral(const CenterProfile& prof, const RadiusKernel& ker,
                         double h, double R) {
  if (R <= h) return 0.0;
  const double e = ker.e();
  double a = h;
  size_t idx = size_t(std::upper_bound(prof.d.begin(), prof.d.end(), h) -
                      prof.d.begin());
  double M = prof.prefix[idx];
  double val = 0.0;
  for (; idx < prof.d.size() && prof.d[idx] < R; ++idx) {
    double b = prof.d[idx];
    if (b > a && M > 0.0) val += std::pow(M, ker.inv) * power_panel(e, a, b);
    if (b > a) a = b;
    M = prof.prefix[idx + 1];
  }
  if (M > 0.0 && R > a) val += std::pow(M, ker.inv) * power_panel(e, a, R);
  return val;
}

ScalarField squared_field(const ScalarField& V) {
  ScalarField sq(V.domain_ptr());
  for (std::int64_t p : V.domain().members()) sq[p] = V[p] * V[p];
  return sq;
}

ScalarField abs_field(const ScalarField& V) {
  ScalarField a(V.domain_ptr());
  for (std::int64_t p : V.domain().members()) a[p] = std::fabs(V[p]);
  return a;
}

std::vector<double> log_radii(double h, double R, int nodes_per_decade) {
  std::vector<double> r;
  if (R <= h) {
    r.push_back(R);
    return r;
  }
  int count = std::max(
      2, int(std::ceil(nodes_per_decade * std::log10(R / h))) + 1);
  double lf = std::log(h), step = (std::log(R) - lf) / (count - 1);
  for (int i = 0; i < count; ++i) r.push_back(std::exp(lf + step * i));
  r.front() = h;
  r.back() = R;
  return r;
}

}  // namespace

double dyadic_constant(int n) {
  return std::log(2.0) / std::pow(2.0, 0.5 * (n - 2));
}

PotentialCurve p_potential(const ScalarField& V, const Point& x, double R,
                           int nodes_per_decade) {
  require(R > 0.0, "p_potential: R must be positive");
  require(nodes_per_decade >= 1, "p_potential: need at least one node per decade");
  const Grid& g = V.grid();
  const double h = g.spacing();
  RadiusKernel ker = p_kernel(g.dim());
  ScalarField sq = squared_field(V);
  CenterProfile prof = build_center_profile(sq, x, R);

  PotentialCurve curve;
  curve.center = x;
  curve.value = subcell_term(ker, prof.center_density, h, R) +
                counting_integral(prof, ker, h, R);
  for (double rho : log_radii(h, R, nodes_per_decade)) {
    double M = profile_mass(prof, rho);
    curve.radii.push_back(rho);
    curve.integrand.push_back(
        (M > 0.0) ? std::pow(M / std::pow(rho, ker.kpow), ker.inv) / rho : 0.0);
  }
  return curve;
}

double p_potential_value(const ScalarField& V, const Point& x, double R) {
  require(R > 0.0, "p_potential: R must be positive");
  const double h = V.grid().spacing();
  RadiusKernel ker = p_kernel(V.grid().dim());
  ScalarField sq = squared_field(V);
  CenterProfile prof = build_center_profile(sq, x, R);
  return subcell_term(ker, prof.center_density, h, R) +
         counting_integral(prof, ker, h, R);
}

double p_potential_dyadic(const ScalarField& V, const Point& x, double R) {
  require(R > 0.0, "p_potential_dyadic: R must be positive");
  const Grid& g = V.grid();
  const double h = g.spacing();
  RadiusKernel ker = p_kernel(g.dim());
  ScalarField sq = squared_field(V);
  CenterProfile prof = build_center_profile(sq, x, R);
  double sum = 0.0;
  for (double Rj = R; Rj >= h; Rj *= 0.5) {
    double M = profile_mass(prof, Rj);
    if (M > 0.0) sum += std::pow(M / std::pow(Rj, ker.kpow), ker.inv);
  }
  return sum;
}

double wolff_potential(const ScalarField& V_measure, const Point& x, double R,
                       double beta, double p, const char* caller) {
  require(R > 0.0, std::string(caller) + ": R must be positive");
  require(p > 1.0, std::string(caller) + ": p must exceed 1");
  const Grid& g = V_measure.grid();
  const int n = g.dim();
  require(beta > 0.0 && beta < double(n) / p,
          std::string(caller) + ": beta must lie in (0, n/p)");
  RadiusKernel ker{1.0 / (p - 1.0), double(n) - beta * p, n};
  ScalarField mu = abs_field(V_measure);
  CenterProfile prof = build_center_profile(mu, x, R);
  return subcell_term(ker, prof.center_density, g.spacing(), R) +
         counting_integral(prof, ker, g.spacing(), R);
}

ScalarField p_potential_field(const ScalarField& V, double R,
                              int nodes_per_decade) {
  require(R > 0.0, "p_potential_field: R must be positive");
  const Grid& g = V.grid();
  const double h = g.spacing();
  RadiusKernel ker = p_kernel(g.dim());
  const double e = ker.e();
  ScalarField sq = squared_field(V);
  ScalarField out(V.domain_ptr());

  for (std::int64_t p : V.domain().members())
    out[p] = subcell_term(ker, sq[p], h, R);
  if (R <= h) return out;

  BallSums sums(sq, R);
  std::vector<double> radii = log_radii(h, R, nodes_per_decade);
  std::vector<double> prev, cur;
  sums.masses(radii[0], prev);
  const auto& members = V.domain().members();
  for (size_t l = 1; l < radii.size(); ++l) {
    sums.masses(radii[l], cur);
    double panel = power_panel(e, radii[l - 1], radii[l]);
    parallel_chunks(std::int64_t(members.size()),
                    [&](int, std::int64_t b, std::int64_t eidx) {
                      for (std::int64_t i = b; i < eidx; ++i) {
                        std::int64_t p = members[size_t(i)];
                        double m0 = prev[size_t(p)], m1 = cur[size_t(p)];
                        double gsum = 0.5 * (std::pow(m0, ker.inv) +
                                             std::pow(m1, ker.inv));
                        out[p] += gsum * panel;
                      }
                    });
    std::swap(prev, cur);
  }
  return out;
}

double potential_sup(const ScalarField& V, double R,
                     const std::optional<Ball>& region, int nodes_per_decade) {
  require(R > 0.0, "potential_sup: R must be positive");
  const Grid& g = V.grid();
  const int dim = g.dim();
  std::vector<std::int64_t> centers;
  for (std::int64_t p : V.domain().members()) {
    if (region && dist(g.point(p), region->center, dim) >= region->radius)
      continue;
    centers.push_back(p);
  }
  if (centers.empty()) return 0.0;

  ScalarField sq = squared_field(V);
  RadiusKernel ker = p_kernel(dim);
  const double h = g.spacing();
  auto exact_value = [&](std::int64_t p) {
    CenterProfile prof = build_center_profile(sq, g.point(p), R);
    return subcell_term(ker, prof.center_density, h, R) +
           counting_integral(prof, ker, h, R);
  };

  double cells_per_ball =
      unit_ball_volume(dim) * std::pow(R / h, double(dim)) + 1.0;
  if (double(centers.size()) * cells_per_ball <= 2e8) {
    return parallel_reduce(
        std::int64_t(centers.size()), 0.0,
        [&](std::int64_t b, std::int64_t e2) {
          double m = 0.0;
          for (std::int64_t i = b; i < e2; ++i)
            m = std::max(m, exact_value(centers[size_t(i)]));
          return m;
        },
        [](double a, double b2) { return std::max(a, b2); });
  }

  // Rank candidates by the FFT ladder, then confirm the best ones exactly.
  ScalarField approx = p_potential_field(V, R, nodes_per_decade);
  std::vector<std::int64_t> order = centers;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::int64_t a, std::int64_t b) {
                     if (approx[a] != approx[b]) return approx[a] > approx[b];
                     return a < b;
                   });
  size_t take = std::min<size_t>(order.size(), 64);
  double best = 0.0;
  for (size_t i = 0; i < take; ++i)
    best = std::max(best, exact_value(order[i]));
  return best;
}

LorentzBoundReport lorentz_bound_check(const ScalarField& V, double R) {
  const int n = V.grid().dim();
  require(n > 2, "lorentz_bound_check: needs dimension > 2");
  LorentzBoundReport rep;
  rep.sup_potential = potential_sup(V, R);
  ScalarField sq = squared_field(V);
  double upper = 2.0 * unit_ball_volume(n) * std::pow(R, double(n));
  rep.hunt_integral =
      maximal_weighted_integral(rearrange(sq), 2.0 / n, 0.5, upper);
  rep.v_lorentz_norm = lorentz_norm(rearrange(abs_field(V)), double(n), 1.0);
  rep.ratio_hunt =
      (rep.hunt_integral > 0.0) ? rep.sup_potential / rep.hunt_integral : 0.0;
  rep.ratio_norm =
      (rep.v_lorentz_norm > 0.0) ? rep.sup_potential / rep.v_lorentz_norm : 0.0;
  return rep;
}

}  // namespace plpot
