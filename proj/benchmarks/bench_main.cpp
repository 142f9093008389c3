#include <benchmark/benchmark.h>

#include "proxis/admm.hpp"
#include "proxis/problems.hpp"
#include "proxis/prox.hpp"
#include "proxis/rng.hpp"
#include "proxis/sampler.hpp"

using namespace proxis;

static void BM_ProxTv1d(benchmark::State& state) {
  Rng rng = make_rng(1);
  const Vector v = standard_normal(rng, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(prox_tv1d(v, 0.5));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ProxTv1d)->RangeMultiplier(4)->Range(64, 16384)->Complexity();

static void BM_ParallelBeamApply(benchmark::State& state) {
  const Index n = state.range(0);
  const auto P = make_parallel_beam(n, 20, static_cast<Index>(1.4 * n));
  const Vector x = shepp_logan(n);
  for (auto _ : state) benchmark::DoNotOptimize(P->apply(x));
}
BENCHMARK(BM_ParallelBeamApply)->Arg(64)->Arg(100)->Unit(benchmark::kMicrosecond);

static void BM_ParallelBeamAdjoint(benchmark::State& state) {
  const Index n = state.range(0);
  const auto P = make_parallel_beam(n, 20, static_cast<Index>(1.4 * n));
  const Vector y = Vector::Ones(P->rows());
  for (auto _ : state) benchmark::DoNotOptimize(P->adjoint_apply(y));
}
BENCHMARK(BM_ParallelBeamAdjoint)->Arg(64)->Arg(100)->Unit(benchmark::kMicrosecond);

// One deblurring draw at the desk settings (fixed 500 iterations).
static void BM_DeblurDraw(benchmark::State& state) {
  const InverseProblemInstance inst = build_deblur1d(128, 0.02, 1000.0, 1);
  RandomizedProblem p;
  p.A = inst.forward;
  p.b = inst.b;
  p.lambda = 1000.0;
  p.f = Regularizer::tv1d(128, 20.0);
  AdmmParams params;
  params.max_iters = 500;
  params.fixed_iterations = true;
  const ImplicitSampler sampler(p, params);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sampler.draw(++seed));
}
BENCHMARK(BM_DeblurDraw)->Unit(benchmark::kMillisecond);

// A lockstep batch of draws through the ensemble path.
static void BM_DeblurEnsemble(benchmark::State& state) {
  const InverseProblemInstance inst = build_deblur1d(128, 0.02, 1000.0, 1);
  RandomizedProblem p;
  p.A = inst.forward;
  p.b = inst.b;
  p.lambda = 1000.0;
  p.f = Regularizer::tv1d(128, 20.0);
  AdmmParams params;
  params.max_iters = 500;
  params.fixed_iterations = true;
  SamplerOptions opts;
  opts.batch_size = state.range(0);
  const ImplicitSampler sampler(p, params, opts);
  for (auto _ : state) benchmark::DoNotOptimize(sampler.draw_ensemble(32, 7, 1));
  state.SetItemsProcessed(state.iterations() * 32);
}
BENCHMARK(BM_DeblurEnsemble)->Arg(1)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
