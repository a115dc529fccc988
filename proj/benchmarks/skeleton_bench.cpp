#include <benchmark/benchmark.h>

#include "qca/phantom.hpp"
#include "qca/skeleton.hpp"

namespace {

qca::Mask tube_mask(int side, double width)
{
    qca::TubeSpec t;
    t.control_points = qca::shape_control_points(qca::TubeShape::s_curve, {side, side});
    t.base_width = width;
    t.stenosis_depth = 0.5;
    return qca::render_mask(t, {side, side}).mask;
}

void BM_Thin(benchmark::State& state)
{
    const auto mask = tube_mask(static_cast<int>(state.range(0)), 20.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(qca::thin(mask));
    }
    state.SetItemsProcessed(state.iterations() * mask.count());
}
BENCHMARK(BM_Thin)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_Prune(benchmark::State& state)
{
    const auto skeleton = qca::thin(tube_mask(512, 28.0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(qca::prune(skeleton));
    }
}
BENCHMARK(BM_Prune)->Unit(benchmark::kMicrosecond);

}  // namespace
