#include <vector>

#include <benchmark/benchmark.h>

#include <ohx/nonlocal.hpp>
#include <ohx/random.hpp>
#include <ohx/solver.hpp>

namespace {

ohx::Field dipole(int n) {
  return ohx::project_initial(ohx::profiles::GaussianDipole{5.0, 1.0}, ohx::make_grid(30.0, n), true);
}

void rhs(benchmark::State& state, ohx::NumericalFlux kind) {
  const ohx::FluxModel model = ohx::make_flux(ohx::FluxSpec{});
  const ohx::Field u = dipole(static_cast<int>(state.range(0)));
  ohx::RhsEvaluator eval(u.grid, model, 0.05, kind);
  std::vector<double> out(u.values.size());
  for (auto _ : state) {
    eval(u.values, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_RhsEngquistOsher(benchmark::State& state) { rhs(state, ohx::NumericalFlux::engquist_osher); }
void BM_RhsRusanov(benchmark::State& state) { rhs(state, ohx::NumericalFlux::rusanov); }

void BM_Primitive(benchmark::State& state) {
  const ohx::Field u = dipole(static_cast<int>(state.range(0)));
  std::vector<double> out(u.values.size());
  for (auto _ : state) {
    ohx::cumulative_primitive(u.values, u.grid.dx(), out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_EngquistOsherFace(benchmark::State& state) {
  const ohx::FluxModel model = ohx::make_flux(ohx::FluxSpec{});
  ohx::CounterRng rng(1);
  std::vector<double> samples(3 * 1024);
  for (std::size_t k = 0; k < samples.size(); k += 3) {
    samples[k] = rng.uniform(0.0, 30.0);
    samples[k + 1] = rng.uniform(-8.0, 8.0);
    samples[k + 2] = rng.uniform(-8.0, 8.0);
  }
  std::size_t k = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ohx::numerical_flux_value(model, samples[k], samples[k + 1], samples[k + 2],
                                                       ohx::NumericalFlux::engquist_osher));
    k = (k + 3) % samples.size();
  }
}

void BM_SolveShort(benchmark::State& state) {
  const ohx::FluxModel model = ohx::make_flux(ohx::FluxSpec{});
  const ohx::Field u0 = dipole(static_cast<int>(state.range(0)));
  ohx::SolverConfig cfg;
  cfg.t_end = 0.25;
  cfg.output_stride = 1000;
  for (auto _ : state) benchmark::DoNotOptimize(ohx::solve(u0, model, cfg).final().u.values.data());
}

}  // namespace

BENCHMARK(BM_RhsEngquistOsher)->Arg(600)->Arg(2400);
BENCHMARK(BM_RhsRusanov)->Arg(600)->Arg(2400);
BENCHMARK(BM_Primitive)->Arg(600)->Arg(2400);
BENCHMARK(BM_EngquistOsherFace);
BENCHMARK(BM_SolveShort)->Arg(600)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
