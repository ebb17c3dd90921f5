// Microbenchmarks for the laboratory's hot paths: pointwise nonlinearity
// evaluation, discrete calculus, rearrangement and Lorentz norms, potential
// evaluation, and full solves at desk scale.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "plpot/calculus.hpp"
#include "plpot/domain.hpp"
#include "plpot/estimates.hpp"
#include "plpot/field.hpp"
#include "plpot/grid.hpp"
#include "plpot/lorentz.hpp"
#include "plpot/model.hpp"
#include "plpot/potentials.hpp"
#include "plpot/rng.hpp"
#include "plpot/solver.hpp"

namespace {

plpot::Grid unit_grid(int dim, int npts) {
  plpot::Index shape{npts, npts, dim == 3 ? npts : 1};
  return plpot::Grid(dim, shape, 1.0 / (npts - 1),
                     plpot::Point{0.0, 0.0, 0.0});
}

plpot::ScalarField lognormal_field(const plpot::DomainPtr& dom,
                                   std::uint64_t seed) {
  plpot::ScalarField f(dom);
  plpot::Rng rng(seed);
  std::vector<double>& raw = f.raw();
  for (std::int64_t p : dom->members()) raw[p] = rng.lognormal(1.0);
  return f;
}

void BM_ModelAEval(benchmark::State& state) {
  const plpot::Model model = plpot::Model::p_laplace(2, 1, 3.0, 1e-4);
  plpot::Rng rng(7);
  std::vector<double> z(2 * 4096), out(2 * 4096);
  for (double& v : z) v = rng.normal();
  for (auto _ : state) {
    for (std::size_t i = 0; i < z.size(); i += 2)
      model.a_eval(&z[i], &out[i]);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(z.size() / 2));
}
BENCHMARK(BM_ModelAEval);

void BM_Gradient2D(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  plpot::Grid g = unit_grid(2, n);
  plpot::DomainPtr dom = plpot::make_box_domain(g);
  plpot::ScalarField f = lognormal_field(dom, 11);
  for (auto _ : state) {
    plpot::VectorField du = plpot::gradient(f);
    benchmark::DoNotOptimize(du.raw().data());
  }
  state.SetItemsProcessed(state.iterations() * g.npoints());
}
BENCHMARK(BM_Gradient2D)->Arg(64)->Arg(128)->Arg(256);

void BM_BallIntegral(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  plpot::Grid g = unit_grid(2, n);
  plpot::DomainPtr dom = plpot::make_box_domain(g);
  plpot::ScalarField f = lognormal_field(dom, 13);
  const plpot::Ball ball{{0.5, 0.5, 0.0}, 0.3};
  for (auto _ : state) {
    benchmark::DoNotOptimize(plpot::ball_integral(f, ball));
  }
}
BENCHMARK(BM_BallIntegral)->Arg(128)->Arg(256);

void BM_Rearrange(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  plpot::Grid g = unit_grid(2, n);
  plpot::DomainPtr dom = plpot::make_box_domain(g);
  plpot::ScalarField f = lognormal_field(dom, 17);
  for (auto _ : state) {
    plpot::RearrangementProfile prof = plpot::rearrange(f);
    benchmark::DoNotOptimize(&prof);
  }
  state.SetItemsProcessed(state.iterations() * g.npoints());
}
BENCHMARK(BM_Rearrange)->Arg(128)->Arg(256);

void BM_LorentzNorm(benchmark::State& state) {
  plpot::Grid g = unit_grid(2, 128);
  plpot::DomainPtr dom = plpot::make_box_domain(g);
  plpot::ScalarField f = lognormal_field(dom, 19);
  const plpot::RearrangementProfile prof = plpot::rearrange(f);
  for (auto _ : state) {
    benchmark::DoNotOptimize(plpot::lorentz_norm(prof, 3.0, 1.0));
  }
}
BENCHMARK(BM_LorentzNorm);

void BM_PotentialValue(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  plpot::Grid g = unit_grid(2, n);
  plpot::DomainPtr dom = plpot::make_box_domain(g);
  plpot::ScalarField V = lognormal_field(dom, 23);
  const plpot::Point x{0.5, 0.5, 0.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(plpot::p_potential_value(V, x, 0.25));
  }
}
BENCHMARK(BM_PotentialValue)->Arg(64)->Arg(128);

void BM_PotentialField(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  plpot::Grid g = unit_grid(2, n);
  plpot::DomainPtr dom = plpot::make_box_domain(g);
  plpot::ScalarField V = lognormal_field(dom, 29);
  for (auto _ : state) {
    plpot::ScalarField P = plpot::p_potential_field(V, 0.25);
    benchmark::DoNotOptimize(P.raw().data());
  }
}
BENCHMARK(BM_PotentialField)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_DirichletSolve(benchmark::State& state) {
  const double p = static_cast<double>(state.range(0)) / 10.0;
  const int n = 33;
  plpot::Grid g(2, plpot::Index{n, n, 1}, 1.0 / (n - 1),
                plpot::Point{0.3, 0.3, 0.0});
  plpot::DomainPtr dom = plpot::make_box_domain(g);
  plpot::Model model = plpot::Model::p_laplace(2, 1, p, 1e-4);
  plpot::VectorField bd(dom, 1, 1);
  bd.fill_from([&](const plpot::Point& x, double* vals) {
    vals[0] = 0.5 * (x[0] * x[0] + x[1] * x[1]);
  });
  plpot::ScalarField fs(dom);
  fs.fill_from([&](const plpot::Point& x) {
    const double r2 = x[0] * x[0] + x[1] * x[1];
    return -(2.0 * std::pow(r2, 0.5 * (p - 2.0)) +
             (p - 2.0) * std::pow(r2, 0.5 * (p - 4.0)) * r2);
  });
  plpot::VectorField f(dom, 1, 1);
  f.raw() = fs.raw();
  plpot::DirichletProblem prob{model, dom, bd,
                               plpot::VectorField(dom, 1, 1), plpot::BSpec{}};
  for (auto _ : state) {
    auto [u, rep] = plpot::solve_dirichlet(prob, f);
    benchmark::DoNotOptimize(u.raw().data());
  }
}
BENCHMARK(BM_DirichletSolve)->Arg(20)->Arg(30)->Arg(40)
    ->Unit(benchmark::kMillisecond);

void BM_HodgeCheck(benchmark::State& state) {
  plpot::Grid g = unit_grid(2, 33);
  plpot::DomainPtr dom = plpot::make_box_domain(g);
  plpot::VectorField w(dom, 1, 1);
  w.fill_from([&](const plpot::Point& x, double* vals) {
    vals[0] = 16.0 * x[0] * (1.0 - x[0]) * x[1] * (1.0 - x[1]);
  });
  for (auto _ : state) {
    plpot::HodgeReport r = plpot::hodge_rigidity_check(w, 0.1, 2.5);
    benchmark::DoNotOptimize(&r);
  }
}
BENCHMARK(BM_HodgeCheck)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
