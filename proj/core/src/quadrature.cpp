#include "plpot/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "plpot/error.hpp"

namespace plpot {

namespace {

GaussRule build_rule(int n) {
  GaussRule r;
  r.nodes.resize(static_cast<std::size_t>(n));
  r.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    // Chebyshev-like initial guess, then Newton on P_n.
    double x = std::cos(3.14159265358979323846 * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    r.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    r.weights[static_cast<std::size_t>(n - 1 - i)] = 2.0 / ((1.0 - x * x) * pp * pp);
  }
  return r;
}

std::mutex g_mutex;
std::map<int, GaussRule> g_rules;

}  // namespace

const GaussRule& gauss_legendre(int order) {
  std::lock_guard<std::mutex> lock(g_mutex);
  auto it = g_rules.find(order);
  if (it == g_rules.end()) it = g_rules.emplace(order, build_rule(order)).first;
  return it->second;
}

double power_panel(double e, double lo, double hi) {
  if (hi <= lo) return 0.0;
  if (e == 0.0) {
    require(lo > 0.0, "power_panel: log panel needs lo > 0");
    return std::log(hi / lo);
  }
  if (lo == 0.0) {
    require(e > 0.0, "power_panel: divergent at the origin");
    return std::pow(hi, e) / e;
  }
  return (std::pow(hi, e) - std::pow(lo, e)) / e;
}

}  // namespace plpot
