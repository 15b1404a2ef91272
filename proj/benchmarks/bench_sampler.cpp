#include <benchmark/benchmark.h>

#include "sjm/conditionals.hpp"
#include "sjm/kernel.hpp"
#include "sjm/sampler.hpp"
#include "sjm/simulate.hpp"

using namespace sjm;

namespace {

struct Fixture {
    Dataset data;
    Hyperparameters hyper = Hyperparameters::defaults();
    ModelState state;
};

Fixture fixture(int V, int n) {
    ScenarioConfig cfg = scenario(4);
    cfg.V = V;
    cfg.n = n;
    Rng rng(1, 0);
    const GroundTruth truth = generateTruth(cfg, rng);
    Fixture f;
    f.data = generateDataset(cfg, truth, rng);
    const SamplerContext ctx = makeContext(f.data, f.hyper);
    f.state = initialState(ctx, rng);
    return f;
}

void BM_Sweep(benchmark::State& st) {
    const Fixture f = fixture(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
    const SamplerContext ctx = makeContext(f.data, f.hyper);
    Rng rng(2, 0);
    ModelState s = f.state;
    for (auto _ : st) {
        s = sweep(ctx, s, rng);
        benchmark::DoNotOptimize(s.muY);
    }
}
BENCHMARK(BM_Sweep)->Args({20, 100})->Args({40, 100})->Args({20, 400})->Unit(benchmark::kMillisecond);

void BM_Kernel(benchmark::State& st) {
    const Fixture f = fixture(static_cast<int>(st.range(0)), 2);
    for (auto _ : st) {
        KernelMatrix k = kernelMatrix(f.data.coords, 0.2);
        benchmark::DoNotOptimize(k);
    }
}
BENCHMARK(BM_Kernel)->Arg(20)->Arg(80)->Arg(200);

void BM_SlabSystem(benchmark::State& st) {
    const Fixture f = fixture(20, static_cast<int>(st.range(0)));
    const PreparedData d = prepare(f.data);
    const KernelMatrix k = kernelMatrix(f.data.coords, f.state.zeta);
    int v = 0;
    for (auto _ : st) {
        SlabSystem sys = slabSystem(v, d, f.state, f.hyper, k);
        benchmark::DoNotOptimize(sys);
        v = (v + 1) % f.data.V;
    }
}
BENCHMARK(BM_SlabSystem)->Arg(100)->Arg(400);

}  // namespace
BENCHMARK_MAIN();
