// Micro-benchmarks for the inner loops that dominate study runtimes.
#include <benchmark/benchmark.h>

#include "wavekin/field.hpp"
#include "wavekin/kernel.hpp"
#include "wavekin/measures.hpp"
#include "wavekin/parallel.hpp"
#include "wavekin/particles.hpp"
#include "wavekin/rng.hpp"
#include "wavekin/samplers.hpp"
#include "wavekin/sim.hpp"

using namespace wavekin;

namespace {

struct BenchState {
    RegularizationKernel kernel{0.4, 8, 2048};
    ParticleEnsemble ensemble;
    WaveField field;

    BenchState() {
        SamplerSpec law;
        law.kind = "ring";
        ensemble = sample_quadrature(law, 256);
        field = init_ground_field(kernel, ensemble, 48, 4.0, 1.25);
    }
};

BenchState& state() {
    static BenchState s;
    return s;
}

} // namespace

static void BM_KernelConstruction(benchmark::State& st) {
    for (auto _ : st) {
        RegularizationKernel k(0.5, 8, 2048);
        benchmark::DoNotOptimize(k.constants().l2);
    }
}
BENCHMARK(BM_KernelConstruction)->Unit(benchmark::kMillisecond);

static void BM_ForceCollocated(benchmark::State& st) {
    auto& s = state();
    std::size_t i = 0;
    for (auto _ : st) {
        const Vec3 f = force(s.kernel, s.field, s.ensemble.q[i % s.ensemble.size()]);
        benchmark::DoNotOptimize(f);
        ++i;
    }
}
BENCHMARK(BM_ForceCollocated);

static void BM_ForceGaussLegendre(benchmark::State& st) {
    auto& s = state();
    std::size_t i = 0;
    for (auto _ : st) {
        const Vec3 f = force_gl(s.kernel, s.field, s.ensemble.q[i % s.ensemble.size()]);
        benchmark::DoNotOptimize(f);
        ++i;
    }
}
BENCHMARK(BM_ForceGaussLegendre);

static void BM_SmearedDensity(benchmark::State& st) {
    auto& s = state();
    ScalarGrid g(48, 4.0);
    for (auto _ : st) {
        smeared_density(s.kernel, s.ensemble, g);
        benchmark::DoNotOptimize(g.data());
    }
}
BENCHMARK(BM_SmearedDensity)->Unit(benchmark::kMillisecond);

static void BM_CoupledStep(benchmark::State& st) {
    auto& s = state();
    ParticleEnsemble ens = s.ensemble;
    SystemState sys{ens, s.field};
    CoupledStepper stepper(s.kernel, sys, 0.05);
    for (auto _ : st) {
        stepper.step();
        benchmark::DoNotOptimize(sys.field.psi.data());
    }
}
BENCHMARK(BM_CoupledStep)->Unit(benchmark::kMillisecond);

static void BM_FieldEnergy(benchmark::State& st) {
    auto& s = state();
    for (auto _ : st) {
        benchmark::DoNotOptimize(field_energy(s.field));
    }
}
BENCHMARK(BM_FieldEnergy)->Unit(benchmark::kMillisecond);

static void BM_KrDistance(benchmark::State& st) {
    const std::size_t n = static_cast<std::size_t>(st.range(0));
    SamplerSpec law;
    law.kind = "ring";
    Philox rng(7);
    const auto a = empirical(sample_iid(law, n, rng));
    const auto b = empirical(sample_quadrature(law, 4 * n));
    for (auto _ : st) {
        benchmark::DoNotOptimize(kr_distance(a, b));
    }
}
BENCHMARK(BM_KrDistance)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
