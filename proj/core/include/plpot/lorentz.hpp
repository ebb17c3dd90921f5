#pragma once

#include <vector>

#include "plpot/field.hpp"

namespace plpot {

// Decreasing rearrangement of a discrete field: a right-continuous step
// function. Runs store the strictly positive levels in decreasing order;
// the field is extended by zero outside its domain, so the profile vanishes
// beyond the last run.
struct RearrangementProfile {
  std::vector<double> level;     // strictly decreasing, > 0
  std::vector<double> measure;   // run lengths, > 0
  std::vector<double> end;       // cumulative measures s_k
  std::vector<double> integral;  // cumulative int_0^{s_k} mu*
  double domain_measure = 0.0;

  double total_measure() const { return end.empty() ? 0.0 : end.back(); }
  double total_integral() const { return integral.empty() ? 0.0 : integral.back(); }

  // mu*(s) with mu*(s) = level[k] on [s_{k-1}, s_k).
  double value(double s) const;
  // int_0^s mu*(t) dt (exact on the step profile).
  double cumulative(double s) const;
  // Hardy-Littlewood maximal function mu**(s) = cumulative(s)/s.
  double maximal(double s) const;
  // distribution |{mu > t}| for t >= 0.
  double distribution(double t) const;
};

RearrangementProfile rearrange(const ScalarField& f);

// Quasinorm [mu]_(gamma,q) = ((q/gamma) int (mu*(r) r^(1/gamma))^q dr/r)^(1/q),
// evaluated in closed form on the step profile.
double lorentz_quasinorm(const RearrangementProfile& mu, double gamma, double q);

// Same quantity through the layer-cake form
// (q int (lambda^gamma |{mu > lambda}|)^(q/gamma) dlambda/lambda)^(1/q).
double lorentz_quasinorm_layercake(const RearrangementProfile& mu, double gamma,
                                   double q);

// Norm with mu** in place of mu*; finite only for gamma > 1 (returns +inf
// otherwise when the profile is nontrivial). Integer q uses per-run closed
// forms, fractional q high-order panel quadrature.
double lorentz_norm(const RearrangementProfile& mu, double gamma, double q);

// int_0^upper (mu**(r) r^a)^q dr/r without normalization; the potential-vs-
// norm bound uses a = 2/n, q = 1/2 on the profile of |V|^2.
double maximal_weighted_integral(const RearrangementProfile& mu, double a,
                                 double q, double upper);

struct SquareIdentityReport {
  double lhs = 0.0;  // [ |V|^2 ]_(n/2, 1/2)
  double rhs = 0.0;  // [ V ]^2_(n, 1)
  double rel_gap = 0.0;
};

// The square identity linking the quasinorm of |V|^2 to that of |V|.
SquareIdentityReport square_identity_check(const ScalarField& magnitude_of_V, int n);

}  // namespace plpot
