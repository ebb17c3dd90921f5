#include "plpot/lorentz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "plpot/error.hpp"
#include "plpot/quadrature.hpp"

namespace plpot {

namespace {

// int_lo^hi (c + v r)^q r^(e0-1) dr with c, v >= 0. Closed form when either
// coefficient vanishes or q is a small integer; quadrature otherwise.
double affine_power_panel(double c, double v, double q, double e0, double lo,
                          double hi) {
  if (hi <= lo) return 0.0;
  if (c == 0.0 && v == 0.0) return 0.0;
  if (c == 0.0) return std::pow(v, q) * power_panel(e0 + q, lo, hi);
  if (v == 0.0) return std::pow(c, q) * power_panel(e0, lo, hi);
  double qi = std::round(q);
  if (q == qi && q >= 1.0 && q <= 20.0) {
    int qn = static_cast<int>(qi);
    double sum = 0.0;
    double binom = 1.0;
    for (int j = 0; j <= qn; ++j) {
      sum += binom * std::pow(c, qn - j) * std::pow(v, j) *
             power_panel(e0 + j, lo, hi);
      binom *= static_cast<double>(qn - j) / static_cast<double>(j + 1);
    }
    return sum;
  }
  require(lo > 0.0, "affine_power_panel: quadrature panel touches the origin");
  return gauss_integrate(
      [&](double r) { return std::pow(c + v * r, q) * std::pow(r, e0 - 1.0); },
      lo, hi, 48);
}

}  // namespace

double RearrangementProfile::value(double s) const {
  if (level.empty() || s >= end.back()) return 0.0;
  if (s < 0.0) s = 0.0;
  auto it = std::upper_bound(end.begin(), end.end(), s);
  return level[static_cast<size_t>(it - end.begin())];
}

double RearrangementProfile::cumulative(double s) const {
  if (level.empty() || s <= 0.0) return 0.0;
  if (s >= end.back()) return integral.back();
  auto it = std::upper_bound(end.begin(), end.end(), s);
  size_t k = static_cast<size_t>(it - end.begin());
  double s_prev = (k == 0) ? 0.0 : end[k - 1];
  double i_prev = (k == 0) ? 0.0 : integral[k - 1];
  return i_prev + level[k] * (s - s_prev);
}

double RearrangementProfile::maximal(double s) const {
  if (level.empty()) return 0.0;
  if (s <= 0.0) return level.front();
  return cumulative(s) / s;
}

double RearrangementProfile::distribution(double t) const {
  require(t >= 0.0, "distribution: level must be >= 0");
  // Largest k with level[k] > t; levels are strictly decreasing.
  auto it = std::lower_bound(level.begin(), level.end(), t,
                             [](double lv, double tt) { return lv > tt; });
  if (it == level.begin()) return 0.0;
  return end[static_cast<size_t>(it - level.begin()) - 1];
}

RearrangementProfile rearrange(const ScalarField& f) {
  const Grid& g = f.domain().grid();
  double cell = g.cell_volume();
  std::vector<double> vals;
  vals.reserve(f.domain().members().size());
  for (std::int64_t p : f.domain().members()) vals.push_back(std::fabs(f[p]));
  std::sort(vals.begin(), vals.end(), std::greater<double>());

  RearrangementProfile prof;
  prof.domain_measure = cell * static_cast<double>(vals.size());
  size_t i = 0;
  double s = 0.0, I = 0.0;
  while (i < vals.size() && vals[i] > 0.0) {
    size_t j = i;
    while (j < vals.size() && vals[j] == vals[i]) ++j;
    double m = cell * static_cast<double>(j - i);
    s += m;
    I += vals[i] * m;
    prof.level.push_back(vals[i]);
    prof.measure.push_back(m);
    prof.end.push_back(s);
    prof.integral.push_back(I);
    i = j;
  }
  return prof;
}

double lorentz_quasinorm(const RearrangementProfile& mu, double gamma,
                         double q) {
  require(gamma > 0.0 && q > 0.0, "lorentz_quasinorm: gamma, q must be > 0");
  double e = q / gamma;
  double sum = 0.0;
  double s_prev_pow = 0.0;
  for (size_t k = 0; k < mu.level.size(); ++k) {
    double s_pow = std::pow(mu.end[k], e);
    sum += std::pow(mu.level[k], q) * (s_pow - s_prev_pow);
    s_prev_pow = s_pow;
  }
  return std::pow(sum, 1.0 / q);
}

double lorentz_quasinorm_layercake(const RearrangementProfile& mu,
                                   double gamma, double q) {
  require(gamma > 0.0 && q > 0.0, "lorentz_quasinorm: gamma, q must be > 0");
  double e = q / gamma;
  double sum = 0.0;
  for (size_t k = 0; k < mu.level.size(); ++k) {
    double v_next = (k + 1 < mu.level.size()) ? mu.level[k + 1] : 0.0;
    sum += std::pow(mu.end[k], e) *
           (std::pow(mu.level[k], q) - std::pow(v_next, q));
  }
  return std::pow(sum, 1.0 / q);
}

double lorentz_norm(const RearrangementProfile& mu, double gamma, double q) {
  require(gamma > 0.0 && q > 0.0, "lorentz_norm: gamma, q must be > 0");
  if (mu.level.empty()) return 0.0;
  if (gamma <= 1.0) return std::numeric_limits<double>::infinity();
  double e0 = q / gamma - q;  // integrand (c + v r)^q r^(e0 - 1)
  double sum = 0.0;
  for (size_t k = 0; k < mu.level.size(); ++k) {
    double s_prev = (k == 0) ? 0.0 : mu.end[k - 1];
    double i_prev = (k == 0) ? 0.0 : mu.integral[k - 1];
    double c = i_prev - mu.level[k] * s_prev;
    sum += affine_power_panel(c, mu.level[k], q, e0, s_prev, mu.end[k]);
  }
  // Beyond the support mu**(r) = I/r; the tail converges because e0 < 0.
  double I = mu.total_integral();
  sum += std::pow(I, q) * std::pow(mu.total_measure(), e0) / (-e0);
  return std::pow((q / gamma) * sum, 1.0 / q);
}

double maximal_weighted_integral(const RearrangementProfile& mu, double a,
                                 double q, double upper) {
  require(q > 0.0, "maximal_weighted_integral: q must be > 0");
  if (mu.level.empty() || upper <= 0.0) return 0.0;
  double e0 = a * q - q;
  double sum = 0.0;
  for (size_t k = 0; k < mu.level.size(); ++k) {
    double s_prev = (k == 0) ? 0.0 : mu.end[k - 1];
    if (s_prev >= upper) return sum;
    double s_k = std::min(mu.end[k], upper);
    double i_prev = (k == 0) ? 0.0 : mu.integral[k - 1];
    double c = i_prev - mu.level[k] * s_prev;
    sum += affine_power_panel(c, mu.level[k], q, e0, s_prev, s_k);
  }
  double s_m = mu.total_measure();
  if (upper > s_m)
    sum += affine_power_panel(mu.total_integral(), 0.0, q, e0, s_m, upper);
  return sum;
}

SquareIdentityReport square_identity_check(const ScalarField& magnitude_of_V,
                                           int n) {
  require(n >= 2, "square_identity_check: dimension must be >= 2");
  ScalarField sq(magnitude_of_V.domain_ptr());
  for (std::int64_t p : magnitude_of_V.domain().members())
    sq[p] = magnitude_of_V[p] * magnitude_of_V[p];
  SquareIdentityReport rep;
  rep.lhs = lorentz_quasinorm(rearrange(sq), 0.5 * n, 0.5);
  double r = lorentz_quasinorm(rearrange(magnitude_of_V), n, 1.0);
  rep.rhs = r * r;
  rep.rel_gap = std::fabs(rep.lhs - rep.rhs) / std::max(rep.rhs, 1e-300);
  return rep;
}

}  // namespace plpot
