#pragma once

#include <vector>

namespace plpot {

struct GaussRule {
  std::vector<double> nodes;    // on (-1, 1)
  std::vector<double> weights;  // sum to 2
};

// Gauss-Legendre rule of the given order (cached; Newton on Legendre roots).
const GaussRule& gauss_legendre(int order);

// int_lo^hi r^(e-1) dr for 0 <= lo < hi, in closed form (log panel at e = 0).
// Throws when the panel touches a divergent origin.
double power_panel(double e, double lo, double hi);

// Integrates f over [a, b] with one panel of the given order.
template <class F>
double gauss_integrate(F f, double a, double b, int order = 24) {
  const GaussRule& r = gauss_legendre(order);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double s = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i)
    s += r.weights[i] * f(mid + half * r.nodes[i]);
  return s * half;
}

}  // namespace plpot
