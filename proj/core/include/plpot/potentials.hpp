#pragma once

#include <optional>
#include <vector>

#include "plpot/field.hpp"

namespace plpot {

// Radius-resolved record of one potential evaluation at a fixed center:
// integrand samples g(rho) = (|V|^2(B(x,rho)) / rho^(n-2))^(1/2) / rho on
// log-spaced radii in [h, R], plus the integral itself. The integral is
// computed exactly on the counting measure (closed forms between the sorted
// cell distances), so refining the sample radii never changes `value`.
struct PotentialCurve {
  Point center{0.0, 0.0, 0.0};
  std::vector<double> radii;
  std::vector<double> integrand;
  double value = 0.0;
};

// P^V(x,R) = int_0^R (|V|^2(B(x,rho)) / rho^(n-2))^(1/2) drho/rho with V
// extended by zero outside the domain. Below one cell the ball carries no
// information; the integrand is extended by its constant uniform-density
// value sqrt(omega_n)|V(x)|.
PotentialCurve p_potential(const ScalarField& V, const Point& x, double R,
                           int nodes_per_decade = 64);

// Just the integral (shared machinery, no curve storage).
double p_potential_value(const ScalarField& V, const Point& x, double R);

// Dyadic sum sum_{j>=1} (|V|^2(B(x,R_j)) / R_j^(n-2))^(1/2), R_j = 2^(1-j) R,
// truncated at R_j < h. With c(n) = log2 / 2^((n-2)/2) the scaled sum is a
// lower bound for p_potential(V, x, 2R).
double p_potential_dyadic(const ScalarField& V, const Point& x, double R);

// Scale factor c(n) for the dyadic lower bound.
double dyadic_constant(int n);

// Wolff potential int_0^R (mu(B(x,rho)) / rho^(n - beta p))^(1/(p-1)) drho/rho
// of the nonnegative density mu = |V_measure|. Requires beta < n/p.
double wolff_potential(const ScalarField& V_measure, const Point& x, double R,
                       double beta, double p, const char* caller = "wolff_potential");

// P^V(x, R) at every member center at once: FFT ball masses on a log-spaced
// radius ladder with trapezoidal panel weights. Approximates the per-center
// curve value (the ladder samples the counting measure instead of resolving
// every cell distance); accuracy improves with nodes_per_decade.
ScalarField p_potential_field(const ScalarField& V, double R,
                              int nodes_per_decade = 64);

// max over member centers x (in `region` if given) of p_potential(V,x,R).
// Small center sets are evaluated exactly one by one; large ones go through
// the FFT ladder to rank candidates, and the top candidates are re-evaluated
// exactly so the reported sup is an exact single-center value.
double potential_sup(const ScalarField& V, double R,
                     const std::optional<Ball>& region = std::nullopt,
                     int nodes_per_decade = 64);

struct LorentzBoundReport {
  double sup_potential = 0.0;   // sup_x P^V(x, R) over member centers
  double hunt_integral = 0.0;   // int_0^(2 omega_n R^n) ((|V|^2)**(rho) rho^(2/n))^(1/2) drho/rho
  double v_lorentz_norm = 0.0;  // ||V||_(n,1)
  double ratio_hunt = 0.0;      // sup / hunt
  double ratio_norm = 0.0;      // sup / norm
};

// The potential-versus-rearrangement chain: sup of the potential against the
// maximal-function integral and against the (n,1) Lorentz norm. n > 2 only.
LorentzBoundReport lorentz_bound_check(const ScalarField& V, double R);

}  // namespace plpot
