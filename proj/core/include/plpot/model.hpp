#pragma once

#include <memory>
#include <vector>

#include "plpot/error.hpp"
#include "plpot/rng.hpp"

namespace plpot {

enum class ModelKind { pLaplace, Uhlenbeck, GeneralGrowth };
enum class GrowthLaw { power, power_log };

// Degenerate elliptic operator a : R^(N*dim) -> R^(N*dim) together with its
// regularization. Three catalogs:
//   pLaplace       a(z) = (|z|^2 + s^2)^((p-2)/2) z, continuous a(0) = 0;
//                  regularized by numerical mollification over the eps ball
//                  (tensor-product midpoint rule, 5 points per axis).
//   Uhlenbeck      a(z) = g(|z|^2) z with g from a named law; regularized by
//                  the exact substitution g_eps(t) = g(eps^2 + t).
//   GeneralGrowth  a(z) = h(|z|) z / |z| with h from a named law; mollified
//                  like pLaplace.
// The degeneracy offset carried by reports is s_eff = s + eps. Instances are
// immutable; regularized(eps) returns a copy.
class Model {
 public:
  static Model p_laplace(int dim, int N, double p, double s);
  static Model uhlenbeck(int dim, int N, double p, GrowthLaw law);
  static Model general_growth(int dim, int N, double p, GrowthLaw law);

  ModelKind kind() const { return kind_; }
  GrowthLaw law() const { return law_; }
  int dim() const { return dim_; }
  int N() const { return N_; }
  int zdim() const { return N_ * dim_; }
  double p() const { return p_; }
  double s() const { return s_; }
  double eps() const { return eps_; }
  double s_eff() const { return s_ + eps_; }
  bool regularized() const { return eps_ > 0.0; }

  Model with_regularization(double eps) const;

  // a(z); out has zdim entries.
  void a_eval(const double* z, double* out) const;
  // derivative matrix, zdim x zdim row major; symmetric positive definite
  // for regularized models.
  void a_derivative(const double* z, double* out) const;
  // convex density A with grad A = a and A(0) = 0.
  double energy_density(const double* z) const;

  // h(t) = |a(t e)| growth profile (general-growth reports); law evaluation.
  double h_of(double t) const;
  double h_prime(double t) const;

  // Ellipticity window of h'(t) t / h(t) over a sampled range (general growth).
  void h_ellipticity(double* delta0, double* lambda) const;

 private:
  Model() = default;
  void base_a(const double* z, double* out) const;
  void base_da(const double* z, double* out) const;
  double base_A(const double* z) const;
  double gfun(double t) const;       // g(t) of the Uhlenbeck law
  double gfun_prime(double t) const;
  double gfun_primitive(double T) const;  // int_0^T g

  ModelKind kind_ = ModelKind::pLaplace;
  GrowthLaw law_ = GrowthLaw::power;
  int dim_ = 2, N_ = 1;
  double p_ = 2.0, s_ = 0.0, eps_ = 0.0;

  struct Moll {
    std::vector<double> offsets;  // node count x zdim
    std::vector<double> weights;  // normalized to 1
  };
  std::shared_ptr<const Moll> moll_;  // set when a mollified kind is regularized
};

// W(z) = |z|^((p-2)/2) z; the natural change of variables for the p growth.
void w_map(double p, const double* z, int zdim, double* out);

struct MonotonicityReport {
  double c_wmap = 0.0;       // two-sided constant between |W(z2)-W(z1)|^2/|z2-z1|^2
                             // and (|z1|^2+|z2|^2)^((p-2)/2)
  double c_degenerate = 0.0; // <a(z2)-a(z1), z2-z1> >= c^-1 |W(z2)-W(z1)|^2
  double c_pgrowth = 0.0;    // p >= 2 only: ... >= c^-1 |z2-z1|^p (0 otherwise)
  double c_coercive = 0.0;   // |z|^p <= c <a(z), z> + c s_eff^p
  int samples = 0;
};

// Samples pairs with log-uniform magnitudes in (mag_lo, mag_hi) and reports
// the smallest admissible constants over the sample.
MonotonicityReport check_monotonicity(const Model& m, int pairs, Rng& rng,
                                      double mag_lo = 1e-3, double mag_hi = 10.0);

struct EllipticityReport {
  double nu0 = 0.0;  // smallest nu with nu^-1 (|z|^2+s_eff^2)^((p-2)/2)|l|^2 <= <da l, l>
  double L0 = 0.0;   // smallest L with |a| + |da|_F (|z|^2+s_eff^2)^(1/2) <= L (...)^((p-1)/2)
  int samples = 0;
};

EllipticityReport sample_ellipticity(const Model& m, int samples, Rng& rng,
                                     double mag_lo = 1e-3, double mag_hi = 10.0);

}  // namespace plpot
