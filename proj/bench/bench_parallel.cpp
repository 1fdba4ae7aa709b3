// Serial reference vs OpenMP paths of the two hot kernels: the zone sums
// behind every Newton step and the per-sample eigensolves of the MC oracle.

#include <benchmark/benchmark.h>

#include "bosoncpa/bzquad.hpp"
#include "bosoncpa/ensemble.hpp"

using namespace bosoncpa;

namespace {

Execution mode(const benchmark::State& state) {
  return state.range(0) ? Execution::kParallel : Execution::kSerial;
}

void BM_KernelIntegralsUniform2d(benchmark::State& state) {
  QuadratureSpec spec;
  spec.points_per_dim = 512;
  spec.rule = QuadratureRule::kUniform;
  const KernelParams kp{{0.01, 0.9}, {0.3, 0.1}, 1.0};
  for (auto _ : state)
    benchmark::DoNotOptimize(kernel_integrals(kp, 2, spec, mode(state)));
  state.SetItemsProcessed(state.iterations() * 512 * 512);
}

void BM_KernelIntegralsAnalytic3d(benchmark::State& state) {
  QuadratureSpec spec;
  spec.points_per_dim = 256;
  const KernelParams kp{{0.01, 0.9}, {0.3, 0.1}, 1.0};
  for (auto _ : state)
    benchmark::DoNotOptimize(kernel_integrals(kp, 3, spec, mode(state)));
  state.SetItemsProcessed(state.iterations() * 256 * 256);
}

void BM_McDosLattice(benchmark::State& state) {
  const auto params = ModelParams::with_dims(1, {16}, 4, 6, 0.63, 1.0);
  McOptions opt;
  opt.samples = 16;
  opt.bins = 50;
  opt.exec = mode(state);
  for (auto _ : state) benchmark::DoNotOptimize(mc_dos(params, opt));
  state.SetItemsProcessed(state.iterations() * 16);
}

}  // namespace

BENCHMARK(BM_KernelIntegralsUniform2d)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_KernelIntegralsAnalytic3d)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_McDosLattice)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
