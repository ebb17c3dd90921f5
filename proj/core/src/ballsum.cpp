#include "plpot/ballsum.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <mutex>

#include "fftw_mutex.hpp"
#include "plpot/error.hpp"

namespace plpot {

namespace {

int round_up8(int v) { return (v + 7) & ~7; }

}  // namespace

struct BallSums::Impl {
  DomainPtr dom;
  double h = 0.0, hn = 0.0;
  int dim = 2;
  int radius_cells = 0;       // kernel offsets range over [-radius_cells, radius_cells]
  int P[3] = {1, 1, 1};       // padded real dims (last axis has P[2] reals)
  std::int64_t nreal = 0, ncplx = 0;
  double* real_buf = nullptr;          // kernel / result workspace
  fftw_complex* cplx_buf = nullptr;    // kernel transform workspace
  fftw_complex* dens_hat = nullptr;    // transformed density, kept
  fftw_plan fwd = nullptr, inv = nullptr;

  ~Impl() {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (inv) fftw_destroy_plan(inv);
    if (real_buf) fftw_free(real_buf);
    if (cplx_buf) fftw_free(cplx_buf);
    if (dens_hat) fftw_free(dens_hat);
  }
};

BallSums::BallSums(const ScalarField& density, double rho_max)
    : impl_(std::make_unique<Impl>()) {
  require(rho_max > 0.0, "BallSums: rho_max must be positive");
  Impl& im = *impl_;
  im.dom = density.domain_ptr();
  const Grid& g = density.grid();
  im.dim = g.dim();
  im.h = g.spacing();
  im.hn = g.cell_volume();
  im.radius_cells = static_cast<int>(std::ceil(rho_max / im.h)) + 1;

  const Index& shape = g.shape();
  for (int k = 0; k < 3; ++k) {
    int need = (k < im.dim) ? shape[k] + 2 * im.radius_cells + 1 : 1;
    im.P[k] = (k < im.dim) ? round_up8(need) : 1;
  }
  im.nreal = static_cast<std::int64_t>(im.P[0]) * im.P[1] * im.P[2];
  im.ncplx = static_cast<std::int64_t>(im.P[0]) * im.P[1] * (im.P[2] / 2 + 1);

  im.real_buf = fftw_alloc_real(static_cast<size_t>(im.nreal));
  im.cplx_buf = fftw_alloc_complex(static_cast<size_t>(im.ncplx));
  im.dens_hat = fftw_alloc_complex(static_cast<size_t>(im.ncplx));
  require(im.real_buf && im.cplx_buf && im.dens_hat, "BallSums: allocation failed");

  {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    if (im.dim == 2) {
      im.fwd = fftw_plan_dft_r2c_2d(im.P[0], im.P[1], im.real_buf, im.cplx_buf,
                                    FFTW_ESTIMATE);
      im.inv = fftw_plan_dft_c2r_2d(im.P[0], im.P[1], im.cplx_buf, im.real_buf,
                                    FFTW_ESTIMATE);
    } else {
      im.fwd = fftw_plan_dft_r2c_3d(im.P[0], im.P[1], im.P[2], im.real_buf,
                                    im.cplx_buf, FFTW_ESTIMATE);
      im.inv = fftw_plan_dft_c2r_3d(im.P[0], im.P[1], im.P[2], im.cplx_buf,
                                    im.real_buf, FFTW_ESTIMATE);
    }
  }
  require(im.fwd && im.inv, "BallSums: plan creation failed");

  // Transform density * h^n once; members only, zero elsewhere.
  std::memset(im.real_buf, 0, sizeof(double) * static_cast<size_t>(im.nreal));
  for (std::int64_t p : im.dom->members()) {
    Index ix = g.unflat(p);
    std::int64_t fp =
        (static_cast<std::int64_t>(ix[0]) * im.P[1] + ix[1]) * im.P[2] + ix[2];
    im.real_buf[fp] = density[p] * im.hn;
  }
  fftw_execute(im.fwd);
  std::memcpy(im.dens_hat, im.cplx_buf,
              sizeof(fftw_complex) * static_cast<size_t>(im.ncplx));
}

BallSums::~BallSums() = default;

void BallSums::masses(double rho, std::vector<double>& out) const {
  const Impl& im = *impl_;
  const Grid& g = im.dom->grid();
  require(rho > 0.0 && rho <= (im.radius_cells - 1 + 1e-12) * im.h,
          "BallSums: rho outside the prepared range");

  std::memset(im.real_buf, 0, sizeof(double) * static_cast<size_t>(im.nreal));
  const int r = std::min(im.radius_cells,
                         static_cast<int>(std::floor(rho / im.h)) + 1);
  const double r2 = (rho / im.h) * (rho / im.h);
  const int d2max = (im.dim == 3) ? r : 0;
  for (int a = -r; a <= r; ++a)
    for (int b = -r; b <= r; ++b)
      for (int c = -d2max; c <= d2max; ++c) {
        double q = double(a) * a + double(b) * b + double(c) * c;
        if (q >= r2) continue;  // strict membership: h*|delta| < rho
        int i = (a + im.P[0]) % im.P[0];
        int j = (b + im.P[1]) % im.P[1];
        int k = (c + im.P[2]) % im.P[2];
        im.real_buf[(static_cast<std::int64_t>(i) * im.P[1] + j) * im.P[2] + k] = 1.0;
      }
  fftw_execute(im.fwd);

  const double scale = 1.0 / static_cast<double>(im.nreal);
  for (std::int64_t t = 0; t < im.ncplx; ++t) {
    double kr = im.cplx_buf[t][0], ki = im.cplx_buf[t][1];
    double dr = im.dens_hat[t][0], di = im.dens_hat[t][1];
    im.cplx_buf[t][0] = (kr * dr - ki * di) * scale;
    im.cplx_buf[t][1] = (kr * di + ki * dr) * scale;
  }
  fftw_execute(im.inv);

  out.assign(static_cast<size_t>(g.npoints()), 0.0);
  for (std::int64_t p : im.dom->members()) {
    Index ix = g.unflat(p);
    std::int64_t fp =
        (static_cast<std::int64_t>(ix[0]) * im.P[1] + ix[1]) * im.P[2] + ix[2];
    double m = im.real_buf[fp];
    out[static_cast<size_t>(p)] = (m > 0.0) ? m : 0.0;
  }
}

}  // namespace plpot
