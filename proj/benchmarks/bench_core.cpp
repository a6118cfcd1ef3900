#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "pvqa/harness.hpp"

using namespace pvqa;

namespace {

IsingModel random_model(std::size_t n) {
  const auto g = gen_gpp(n, 0.5, 7);
  return rescale_ising(qubo_to_ising(gpp_qubo(g, 1.0).combined())).model;
}

}  // namespace

// One RK4 evolution of the linear path; n spins, T = 1, default step.
static void BM_EvolveRk4(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto m = random_model(n);
  const LinearSchedule sch{0.0, 1.0, 1.0};
  const double dt = default_dt(1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(evolve_rk4(m, sch, dt));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_EvolveRk4)->DenseRange(4, 12, 2)->Unit(benchmark::kMillisecond);

// Re-evaluating a continuous schedule after perturbing its tail, as a
// finite-difference gradient does; the cache resumes from the shared prefix.
static void BM_CachedRk4Tail(benchmark::State& state) {
  const auto m = random_model(8);
  CachedRk4 cache(ising_energy_table(m), 8, default_dt(1.0));
  ContinuousSchedule sch{std::vector<double>(100, 0.5), 1.0};
  cache.evolve(sch);
  std::size_t k = 0;
  for (auto _ : state) {
    sch.values[99 - (k++ % 10)] += 1e-6;
    benchmark::DoNotOptimize(cache.evolve(sch));
  }
}
BENCHMARK(BM_CachedRk4Tail)->Unit(benchmark::kMicrosecond);

static void BM_QaoaExact(benchmark::State& state) {
  const auto p = static_cast<std::size_t>(state.range(0));
  const auto m = random_model(8);
  QaoaSchedule q;
  q.horizon = 1.0;
  for (std::size_t k = 0; k < 2 * p; ++k) {
    q.breakpoints.push_back(static_cast<double>(k + 1) / static_cast<double>(2 * p));
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(evolve_qaoa_exact(m, q));
  }
}
BENCHMARK(BM_QaoaExact)->Arg(1)->Arg(3)->Arg(10);

// Full repair table: greedy descent from every configuration.
static void BM_RepairTable(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto g = gen_gpp(n, 0.5, 3);
  const auto rm = make_repair_model(gpp_qubo(g, 1.0).objective(), constraint_of(g));
  for (auto _ : state) {
    benchmark::DoNotOptimize(repair_table(rm));
  }
  state.SetItemsProcessed(state.iterations() * (std::int64_t{1} << n));
}
BENCHMARK(BM_RepairTable)->DenseRange(8, 14, 2)->Unit(benchmark::kMillisecond);

static void BM_BruteForceOptima(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto g = gen_gpp(n, 0.5, 5);
  const ProblemInstance inst{g};
  const auto pair = build_qubo(inst, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(brute_force_optima(inst, pair));
  }
}
BENCHMARK(BM_BruteForceOptima)->DenseRange(8, 16, 4);

// One objective evaluation of pVQA on an 8-node graph: evolve, measure, repair, score.
static void BM_VariantObjective(benchmark::State& state) {
  const ProblemContext ctx(gen_gpp(8, 0.5, 1), "bench");
  const auto spec = VariantSpec::make(Variant::PVqa, ScheduleFamily::linear(), 1.0);
  const std::vector<double> params{0.2, 0.8};
  for (auto _ : state) {
    benchmark::DoNotOptimize(variant_objective(spec, ctx, 1.0, params));
  }
}
BENCHMARK(BM_VariantObjective)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
