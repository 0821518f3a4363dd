#include <benchmark/benchmark.h>

#include "enclosure/kernels.hpp"

using namespace enclosure;

namespace {

const ProbePulse& pulse() {
    static const ProbePulse p(Vec3{-0.5, 0.5, 0.5}, 0.1);
    return p;
}

void BM_FreeWave(benchmark::State& state) {
    double t = 0.72;
    for (auto _ : state) {
        benchmark::DoNotOptimize(pulse().v(0.75, t));
        t += 1e-7;
    }
}
BENCHMARK(BM_FreeWave);

void BM_TruncatedReference(benchmark::State& state) {
    double tau = 8.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(pulse().w0_truncated_radial(0.75, tau, 1.6));
        tau += 1e-7;
    }
}
BENCHMARK(BM_TruncatedReference);

void BM_RadialDerivativeOfReference(benchmark::State& state) {
    double tau = 8.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(pulse().dr_w0_truncated_radial(0.75, tau, 1.6));
        tau += 1e-7;
    }
}
BENCHMARK(BM_RadialDerivativeOfReference);

void BM_WeightedBallPotential(benchmark::State& state) {
    const Vec3 x{0.3, 0.5, 0.5};
    double tau = 8.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(pulse().ball_potential_weighted(x, tau));
        tau += 1e-7;
    }
}
BENCHMARK(BM_WeightedBallPotential);

}  // namespace
