#include <benchmark/benchmark.h>

#include "enclosure/indicator.hpp"
#include "enclosure/recovery.hpp"

using namespace enclosure;

namespace {

const ForwardRun& run() {
    static const ForwardRun r = [] {
        SolveOptions o;
        o.T_max = 1.6;
        return solve_ibvp(ValidatedScene::validate(reference_scene(1.0 / 32.0)), o);
    }();
    return r;
}

void BM_IndicatorFull(benchmark::State& state) {
    const IndicatorAssembler ind(run().trace, run().pulse);
    for (auto _ : state) benchmark::DoNotOptimize(ind.full(8.0, 1.6));
}
BENCHMARK(BM_IndicatorFull)->Unit(benchmark::kMicrosecond);

void BM_IndicatorCurveAndFit(benchmark::State& state) {
    const IndicatorAssembler ind(run().trace, run().pulse);
    const auto taus = reference_scene(1.0 / 32.0).tau_grid;
    for (auto _ : state) {
        const auto curve = ind.curve(taus, 1.6, 0.9);
        benchmark::DoNotOptimize(fit_distance(curve, IndicatorVariant::full));
    }
}
BENCHMARK(BM_IndicatorCurveAndFit)->Unit(benchmark::kMillisecond);

}  // namespace
