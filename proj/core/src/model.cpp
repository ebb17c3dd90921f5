#include "plpot/model.hpp"

#include <cmath>
#include <cstring>

#include "plpot/quadrature.hpp"

namespace plpot {

namespace {

constexpr double kE = 2.71828182845904523536;

double sq_norm(const double* z, int d) {
  double s = 0.0;
  for (int i = 0; i < d; ++i) s += z[i] * z[i];
  return s;
}

}  // namespace

Model Model::p_laplace(int dim, int N, double p, double s) {
  require(p > 1.0, "Model: p must exceed 1");
  require(s >= 0.0, "Model: s must be nonnegative");
  Model m;
  m.kind_ = ModelKind::pLaplace;
  m.dim_ = dim;
  m.N_ = N;
  m.p_ = p;
  m.s_ = s;
  return m;
}

Model Model::uhlenbeck(int dim, int N, double p, GrowthLaw law) {
  require(p > 1.0, "Model: p must exceed 1");
  Model m;
  m.kind_ = ModelKind::Uhlenbeck;
  m.law_ = law;
  m.dim_ = dim;
  m.N_ = N;
  m.p_ = p;
  return m;
}

Model Model::general_growth(int dim, int N, double p, GrowthLaw law) {
  require(p > 1.0, "Model: p must exceed 1");
  Model m;
  m.kind_ = ModelKind::GeneralGrowth;
  m.law_ = law;
  m.dim_ = dim;
  m.N_ = N;
  m.p_ = p;
  return m;
}

Model Model::with_regularization(double eps) const {
  require(eps > 0.0, "Model: regularization scale must be positive");
  Model m = *this;
  m.eps_ = eps;
  m.moll_.reset();
  if (kind_ == ModelKind::pLaplace || kind_ == ModelKind::GeneralGrowth) {
    const int d = zdim();
    require(d <= 6,
            "Model: mollified regularization supports N*dim <= 6; use the "
            "Uhlenbeck catalog for larger systems");
    // Tensor-product midpoint rule, 5 points per axis, restricted to the
    // support of the bump and renormalized. Node symmetry makes the rule
    // exact on constant and linear integrands.
    auto moll = std::make_shared<Moll>();
    const double mids[5] = {-0.8, -0.4, 0.0, 0.4, 0.8};
    int counts[6] = {0, 0, 0, 0, 0, 0};
    std::vector<double> y(static_cast<std::size_t>(d));
    double wsum = 0.0;
    const std::int64_t total = [d] {
      std::int64_t t = 1;
      for (int i = 0; i < d; ++i) t *= 5;
      return t;
    }();
    for (std::int64_t node = 0; node < total; ++node) {
      std::int64_t rem = node;
      double r2 = 0.0;
      for (int i = 0; i < d; ++i) {
        counts[i] = static_cast<int>(rem % 5);
        rem /= 5;
        y[static_cast<std::size_t>(i)] = mids[counts[i]];
        r2 += y[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i)];
      }
      if (r2 >= 1.0) continue;
      const double w = std::exp(-1.0 / (1.0 - r2));
      for (int i = 0; i < d; ++i)
        moll->offsets.push_back(eps * y[static_cast<std::size_t>(i)]);
      moll->weights.push_back(w);
      wsum += w;
    }
    for (double& w : moll->weights) w /= wsum;
    m.moll_ = std::move(moll);
  }
  return m;
}

double Model::gfun(double t) const {
  switch (law_) {
    case GrowthLaw::power:
      return std::pow(t, 0.5 * (p_ - 2.0));
    case GrowthLaw::power_log:
      return std::pow(t, 0.5 * (p_ - 2.0)) * std::log(kE + t);
  }
  return 0.0;
}

double Model::gfun_prime(double t) const {
  switch (law_) {
    case GrowthLaw::power:
      return 0.5 * (p_ - 2.0) * std::pow(t, 0.5 * (p_ - 4.0));
    case GrowthLaw::power_log:
      return 0.5 * (p_ - 2.0) * std::pow(t, 0.5 * (p_ - 4.0)) * std::log(kE + t) +
             std::pow(t, 0.5 * (p_ - 2.0)) / (kE + t);
  }
  return 0.0;
}

double Model::gfun_primitive(double T) const {
  if (T <= 0.0) return 0.0;
  if (law_ == GrowthLaw::power) return std::pow(T, 0.5 * p_) / (0.5 * p_);
  // substitute t = sigma^2: integrand 2 sigma g(sigma^2) stays bounded at 0
  return gauss_integrate(
      [this](double sig) { return 2.0 * sig * gfun(sig * sig); }, 0.0,
      std::sqrt(T), 32);
}

void Model::base_a(const double* z, double* out) const {
  const int d = zdim();
  if (kind_ == ModelKind::pLaplace) {
    const double t = sq_norm(z, d) + s_ * s_;
    if (t <= 0.0) {
      std::memset(out, 0, sizeof(double) * static_cast<std::size_t>(d));
      return;
    }
    const double f = std::pow(t, 0.5 * (p_ - 2.0));
    for (int i = 0; i < d; ++i) out[i] = f * z[i];
    return;
  }
  // GeneralGrowth: a(z) = h(|z|) z / |z|
  const double r = std::sqrt(sq_norm(z, d));
  if (r <= 0.0) {
    std::memset(out, 0, sizeof(double) * static_cast<std::size_t>(d));
    return;
  }
  const double f = h_of(r) / r;
  for (int i = 0; i < d; ++i) out[i] = f * z[i];
}

void Model::base_da(const double* z, double* out) const {
  const int d = zdim();
  std::memset(out, 0, sizeof(double) * static_cast<std::size_t>(d * d));
  if (kind_ == ModelKind::pLaplace) {
    const double zz = sq_norm(z, d);
    const double t = zz + s_ * s_;
    if (t <= 0.0) {
      require(p_ >= 2.0, "Model: derivative unbounded at the origin for p < 2");
      if (p_ == 2.0)
        for (int i = 0; i < d; ++i) out[i * d + i] = 1.0;
      return;
    }
    const double iso = std::pow(t, 0.5 * (p_ - 2.0));
    const double ani = zz > 0.0 ? (p_ - 2.0) * std::pow(t, 0.5 * (p_ - 4.0)) : 0.0;
    for (int i = 0; i < d; ++i) {
      out[i * d + i] = iso;
      for (int j = 0; j < d; ++j) out[i * d + j] += ani * z[i] * z[j];
    }
    return;
  }
  const double r = std::sqrt(sq_norm(z, d));
  if (r <= 0.0) {
    require(p_ >= 2.0, "Model: derivative unbounded at the origin for p < 2");
    const double lim = p_ == 2.0 ? h_prime(0.0) : 0.0;
    for (int i = 0; i < d; ++i) out[i * d + i] = lim;
    return;
  }
  const double frac = h_of(r) / r;
  const double diff = h_prime(r) - frac;
  for (int i = 0; i < d; ++i) {
    out[i * d + i] = frac;
    for (int j = 0; j < d; ++j) out[i * d + j] += diff * (z[i] / r) * (z[j] / r);
  }
}

double Model::base_A(const double* z) const {
  const int d = zdim();
  if (kind_ == ModelKind::pLaplace) {
    const double t = sq_norm(z, d) + s_ * s_;
    return (std::pow(t, 0.5 * p_) - std::pow(s_, p_)) / p_;
  }
  const double r = std::sqrt(sq_norm(z, d));
  if (law_ == GrowthLaw::power) return std::pow(r, p_) / p_;
  return gauss_integrate([this](double tau) { return h_of(tau); }, 0.0, r, 32);
}

void Model::a_eval(const double* z, double* out) const {
  const int d = zdim();
  if (kind_ == ModelKind::Uhlenbeck) {
    const double T = sq_norm(z, d) + eps_ * eps_;
    if (T <= 0.0) {
      std::memset(out, 0, sizeof(double) * static_cast<std::size_t>(d));
      return;
    }
    const double g = gfun(T);
    for (int i = 0; i < d; ++i) out[i] = g * z[i];
    return;
  }
  if (!moll_) {
    base_a(z, out);
    return;
  }
  std::memset(out, 0, sizeof(double) * static_cast<std::size_t>(d));
  std::vector<double> shifted(static_cast<std::size_t>(d)), tmp(static_cast<std::size_t>(d));
  const std::size_t nodes = moll_->weights.size();
  for (std::size_t q = 0; q < nodes; ++q) {
    for (int i = 0; i < d; ++i)
      shifted[static_cast<std::size_t>(i)] = z[i] - moll_->offsets[q * static_cast<std::size_t>(d) + static_cast<std::size_t>(i)];
    base_a(shifted.data(), tmp.data());
    const double w = moll_->weights[q];
    for (int i = 0; i < d; ++i) out[i] += w * tmp[static_cast<std::size_t>(i)];
  }
}

void Model::a_derivative(const double* z, double* out) const {
  const int d = zdim();
  if (kind_ == ModelKind::Uhlenbeck) {
    const double T = sq_norm(z, d) + eps_ * eps_;
    std::memset(out, 0, sizeof(double) * static_cast<std::size_t>(d * d));
    if (T <= 0.0) {
      require(p_ >= 2.0, "Model: derivative unbounded at the origin for p < 2");
      if (p_ == 2.0)
        for (int i = 0; i < d; ++i) out[i * d + i] = gfun(0.0);
      return;
    }
    const double g = gfun(T);
    const double gp = 2.0 * gfun_prime(T);
    for (int i = 0; i < d; ++i) {
      out[i * d + i] = g;
      for (int j = 0; j < d; ++j) out[i * d + j] += gp * z[i] * z[j];
    }
    return;
  }
  if (!moll_) {
    base_da(z, out);
    return;
  }
  std::memset(out, 0, sizeof(double) * static_cast<std::size_t>(d * d));
  std::vector<double> shifted(static_cast<std::size_t>(d)),
      tmp(static_cast<std::size_t>(d * d));
  // Nodes landing exactly on the kink of the unregularized density are
  // skipped (principal value; a measure-zero event for generic arguments).
  const double floor2 = 1e-24 * eps_ * eps_;
  const std::size_t nodes = moll_->weights.size();
  for (std::size_t q = 0; q < nodes; ++q) {
    for (int i = 0; i < d; ++i)
      shifted[static_cast<std::size_t>(i)] = z[i] - moll_->offsets[q * static_cast<std::size_t>(d) + static_cast<std::size_t>(i)];
    if (p_ < 2.0 && sq_norm(shifted.data(), d) + s_ * s_ <= floor2) continue;
    base_da(shifted.data(), tmp.data());
    const double w = moll_->weights[q];
    for (int i = 0; i < d * d; ++i) out[i] += w * tmp[static_cast<std::size_t>(i)];
  }
}

double Model::energy_density(const double* z) const {
  const int d = zdim();
  if (kind_ == ModelKind::Uhlenbeck) {
    const double T = sq_norm(z, d);
    if (eps_ == 0.0) return 0.5 * gfun_primitive(T);
    if (law_ == GrowthLaw::power)
      return (std::pow(eps_ * eps_ + T, 0.5 * p_) - std::pow(eps_, p_)) / p_;
    return 0.5 * gauss_integrate(
                     [this](double tau) { return gfun(eps_ * eps_ + tau); }, 0.0,
                     T, 32);
  }
  if (!moll_) return base_A(z);
  std::vector<double> shifted(static_cast<std::size_t>(d));
  double acc = 0.0;
  const std::size_t nodes = moll_->weights.size();
  for (std::size_t q = 0; q < nodes; ++q) {
    for (int i = 0; i < d; ++i)
      shifted[static_cast<std::size_t>(i)] = z[i] - moll_->offsets[q * static_cast<std::size_t>(d) + static_cast<std::size_t>(i)];
    acc += moll_->weights[q] * base_A(shifted.data());
  }
  return acc;
}

double Model::h_of(double t) const {
  switch (kind_) {
    case ModelKind::pLaplace:
      return std::pow(t * t + s_ * s_, 0.5 * (p_ - 2.0)) * t;
    case ModelKind::Uhlenbeck:
      return t <= 0.0 ? 0.0 : gfun(t * t + eps_ * eps_) * t;
    case ModelKind::GeneralGrowth: {
      if (t <= 0.0) return 0.0;
      const double base = std::pow(t, p_ - 1.0);
      return law_ == GrowthLaw::power ? base : base * std::log(kE + t);
    }
  }
  return 0.0;
}

double Model::h_prime(double t) const {
  if (kind_ == ModelKind::GeneralGrowth) {
    if (t <= 0.0) return p_ == 2.0 ? (law_ == GrowthLaw::power ? 1.0 : 1.0) : 0.0;
    const double base = std::pow(t, p_ - 2.0);
    if (law_ == GrowthLaw::power) return (p_ - 1.0) * base;
    return (p_ - 1.0) * base * std::log(kE + t) + base * t / (kE + t);
  }
  // numeric profile slope for the power kinds (reports only)
  const double dt = std::max(1e-6, 1e-6 * t);
  return (h_of(t + dt) - h_of(std::max(0.0, t - dt))) / (t + dt - std::max(0.0, t - dt));
}

void Model::h_ellipticity(double* delta0, double* lambda) const {
  double lo = 1e300, hi = -1e300;
  for (int i = 0; i <= 160; ++i) {
    const double t = std::pow(10.0, -4.0 + 8.0 * i / 160.0);
    const double ratio = h_prime(t) * t / h_of(t);
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  *delta0 = lo;
  *lambda = hi;
}

void w_map(double p, const double* z, int zdim, double* out) {
  const double r2 = sq_norm(z, zdim);
  if (r2 <= 0.0) {
    for (int i = 0; i < zdim; ++i) out[i] = 0.0;
    return;
  }
  const double f = std::pow(r2, 0.25 * (p - 2.0));
  for (int i = 0; i < zdim; ++i) out[i] = f * z[i];
}

namespace {

void sample_z(Rng& rng, int d, double lo, double hi, double* z) {
  double norm2 = 0.0;
  for (int i = 0; i < d; ++i) {
    z[i] = rng.normal();
    norm2 += z[i] * z[i];
  }
  const double r = std::sqrt(norm2);
  const double mag = std::exp(rng.uniform(std::log(lo), std::log(hi)));
  for (int i = 0; i < d; ++i) z[i] = r > 0.0 ? z[i] / r * mag : 0.0;
}

}  // namespace

MonotonicityReport check_monotonicity(const Model& m, int pairs, Rng& rng,
                                      double mag_lo, double mag_hi) {
  const int d = m.zdim();
  const double p = m.p();
  MonotonicityReport rep;
  rep.samples = pairs;
  std::vector<double> z1(static_cast<std::size_t>(d)), z2(static_cast<std::size_t>(d)),
      a1(static_cast<std::size_t>(d)), a2(static_cast<std::size_t>(d)),
      w1(static_cast<std::size_t>(d)), w2(static_cast<std::size_t>(d));
  for (int it = 0; it < pairs; ++it) {
    sample_z(rng, d, mag_lo, mag_hi, z1.data());
    sample_z(rng, d, mag_lo, mag_hi, z2.data());
    double dz2 = 0.0;
    for (int i = 0; i < d; ++i) dz2 += (z2[static_cast<std::size_t>(i)] - z1[static_cast<std::size_t>(i)]) * (z2[static_cast<std::size_t>(i)] - z1[static_cast<std::size_t>(i)]);
    if (dz2 <= 1e-28) continue;
    m.a_eval(z1.data(), a1.data());
    m.a_eval(z2.data(), a2.data());
    w_map(p, z1.data(), d, w1.data());
    w_map(p, z2.data(), d, w2.data());
    double dw2 = 0.0, pair_aa = 0.0, n1 = 0.0, n2 = 0.0;
    for (int i = 0; i < d; ++i) {
      const double dw = w2[static_cast<std::size_t>(i)] - w1[static_cast<std::size_t>(i)];
      dw2 += dw * dw;
      pair_aa += (a2[static_cast<std::size_t>(i)] - a1[static_cast<std::size_t>(i)]) * (z2[static_cast<std::size_t>(i)] - z1[static_cast<std::size_t>(i)]);
      n1 += z1[static_cast<std::size_t>(i)] * z1[static_cast<std::size_t>(i)];
      n2 += z2[static_cast<std::size_t>(i)] * z2[static_cast<std::size_t>(i)];
    }
    const double base = std::pow(n1 + n2, 0.5 * (p - 2.0));
    const double ratio = dw2 / dz2;
    if (base > 0.0 && ratio > 0.0)
      rep.c_wmap = std::max(rep.c_wmap, std::max(ratio / base, base / ratio));
    if (pair_aa > 0.0) {
      rep.c_degenerate = std::max(rep.c_degenerate, dw2 / pair_aa);
      if (p >= 2.0)
        rep.c_pgrowth =
            std::max(rep.c_pgrowth, std::pow(dz2, 0.5 * p) / pair_aa);
    } else {
      rep.c_degenerate = rep.c_pgrowth = 1e300;
    }
    // coercivity against the first sample of the pair
    double az = 0.0;
    for (int i = 0; i < d; ++i) az += a1[static_cast<std::size_t>(i)] * z1[static_cast<std::size_t>(i)];
    const double denom = az + std::pow(m.s_eff(), p);
    if (denom > 0.0)
      rep.c_coercive = std::max(rep.c_coercive, std::pow(n1, 0.5 * p) / denom);
  }
  return rep;
}

EllipticityReport sample_ellipticity(const Model& m, int samples, Rng& rng,
                                     double mag_lo, double mag_hi) {
  const int d = m.zdim();
  EllipticityReport rep;
  rep.samples = samples;
  std::vector<double> z(static_cast<std::size_t>(d)), l(static_cast<std::size_t>(d)),
      a(static_cast<std::size_t>(d)), da(static_cast<std::size_t>(d * d));
  const double se2 = m.s_eff() * m.s_eff();
  for (int it = 0; it < samples; ++it) {
    sample_z(rng, d, mag_lo, mag_hi, z.data());
    sample_z(rng, d, 1.0, 1.0, l.data());
    m.a_eval(z.data(), a.data());
    m.a_derivative(z.data(), da.data());
    const double t = sq_norm(z.data(), d) + se2;
    double quad = 0.0, fro = 0.0, amag = 0.0;
    for (int i = 0; i < d; ++i) {
      double row = 0.0;
      for (int j = 0; j < d; ++j) {
        row += da[static_cast<std::size_t>(i * d + j)] * l[static_cast<std::size_t>(j)];
        fro += da[static_cast<std::size_t>(i * d + j)] * da[static_cast<std::size_t>(i * d + j)];
      }
      quad += l[static_cast<std::size_t>(i)] * row;
      amag += a[static_cast<std::size_t>(i)] * a[static_cast<std::size_t>(i)];
    }
    fro = std::sqrt(fro);
    amag = std::sqrt(amag);
    if (quad > 0.0)
      rep.nu0 = std::max(rep.nu0, std::pow(t, 0.5 * (m.p() - 2.0)) / quad);
    else
      rep.nu0 = 1e300;
    rep.L0 = std::max(rep.L0, (amag + fro * std::sqrt(t)) /
                                  std::pow(t, 0.5 * (m.p() - 1.0)));
  }
  return rep;
}

}  // namespace plpot
