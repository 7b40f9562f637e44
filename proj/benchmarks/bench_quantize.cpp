#include <benchmark/benchmark.h>

#include "dynquant/classical.hpp"
#include "dynquant/evolve.hpp"
#include "dynquant/lindblad.hpp"
#include "dynquant/superop.hpp"

using namespace dynquant;

namespace {

PolySymbol dense_symbol(int deg) {
  PolySymbol f(1);
  for (int a = 0; a <= deg; ++a)
    for (int b = 0; a + b <= deg; ++b) {
      MultiIndex idx(1);
      idx.q[0] = a;
      idx.p[0] = b;
      f.add_term(idx, 1.0 / (1 + a + b));
    }
  return f;
}

void BM_weyl_quantize(benchmark::State& state) {
  QuantizationContext ctx(1.0, static_cast<int>(state.range(0)));
  PolySymbol f = dense_symbol(4);
  for (auto _ : state) benchmark::DoNotOptimize(weyl_quantize(f, ctx).m);
}
BENCHMARK(BM_weyl_quantize)->Arg(16)->Arg(32)->Arg(64);

void BM_quantize_dynop(benchmark::State& state) {
  QuantizationContext ctx(1.0, static_cast<int>(state.range(0)), 2);
  auto l = dynop_friction_oscillator(restrict_modes(lorenz_coefficients(), 2));
  for (auto _ : state) benchmark::DoNotOptimize(quantize_dynop(l, ctx).term_count());
}
BENCHMARK(BM_quantize_dynop)->Arg(6)->Arg(10)->Arg(16);

void BM_superop_apply(benchmark::State& state) {
  QuantizationContext ctx(1.0, static_cast<int>(state.range(0)));
  FokkerPlanckCoeffs c;
  c.c_pq = -1;
  c.c_qp = 1;
  c.c_pp = 0.4;
  c.d_qq = c.d_pp = 0.2;
  auto s = build_lindblad_superop(solve_lindblad_ops(c, ctx));
  auto rho = coherent_state(ctx, 0.3, 0.0, 1e-3);
  for (auto _ : state) benchmark::DoNotOptimize(s.apply(rho).m);
}
BENCHMARK(BM_superop_apply)->Arg(16)->Arg(32)->Arg(64)->Arg(128);

void BM_evolve_rk4_step(benchmark::State& state) {
  QuantizationContext ctx(1.0, static_cast<int>(state.range(0)));
  FokkerPlanckCoeffs c;
  c.c_pq = -1;
  c.c_qp = 1;
  c.c_pp = 0.4;
  c.d_qq = c.d_pp = 0.2;
  auto s = build_lindblad_superop(solve_lindblad_ops(c, ctx));
  auto rho = coherent_state(ctx, 0.3, 0.0, 1e-3);
  EvolutionSpec spec;
  spec.dt = 1e-3;
  spec.steps = 10;
  for (auto _ : state) benchmark::DoNotOptimize(evolve_state(s, rho, {}, spec).final_value.m);
}
BENCHMARK(BM_evolve_rk4_step)->Arg(16)->Arg(32)->Arg(64);

void BM_classical_lorenz(benchmark::State& state) {
  auto rhs = vector_field(dynop_friction_oscillator(lorenz_coefficients()));
  ClassicalState x0;
  x0.q = {0, 0, 0};
  x0.p = {1, 1, 20};
  for (auto _ : state)
    benchmark::DoNotOptimize(integrate_classical(rhs, x0, 0.002, 1000, 1000).back().p[0]);
}
BENCHMARK(BM_classical_lorenz);

}  // namespace

BENCHMARK_MAIN();
