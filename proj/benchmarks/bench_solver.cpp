#include <benchmark/benchmark.h>

#include "enclosure/solver.hpp"

using namespace enclosure;

namespace {

void BM_LeapfrogStep(benchmark::State& state) {
    const double h = 1.0 / static_cast<double>(state.range(0));
    const SceneConfig c = reference_scene(h);
    LeapfrogLattice core(FluidMask::build(Lattice::covering(c.omega, c.h), c.obstacles));
    const auto faces = outer_faces(core.mask());
    const std::vector<double> flux(faces.size(), 1e-3);
    core.start_from_rest(c.dt, faces, flux);
    for (auto _ : state) core.step(c.dt, faces, flux);
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(core.lattice().cell_count()));
}
BENCHMARK(BM_LeapfrogStep)->Arg(32)->Arg(64)->Arg(96)->Unit(benchmark::kMillisecond);

void BM_SolveReferenceScene(benchmark::State& state) {
    const auto scene = ValidatedScene::validate(reference_scene(1.0 / static_cast<double>(state.range(0))));
    SolveOptions o;
    o.T_max = 1.6;
    for (auto _ : state) benchmark::DoNotOptimize(solve_ibvp(scene, o));
}
BENCHMARK(BM_SolveReferenceScene)->Arg(32)->Arg(48)->Unit(benchmark::kMillisecond);

}  // namespace
