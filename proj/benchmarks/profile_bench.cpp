#include <benchmark/benchmark.h>

#include "qca/phantom.hpp"
#include "qca/profile.hpp"
#include "qca/skeleton.hpp"

namespace {

void BM_WidthProfile(benchmark::State& state)
{
    const qca::Size canvas{512, 512};
    qca::TubeSpec t;
    t.control_points = qca::shape_control_points(qca::TubeShape::c_curve, canvas);
    t.base_width = static_cast<double>(state.range(0));
    t.stenosis_depth = 0.5;
    const auto mask = qca::render_mask(t, canvas).mask;
    const auto centerline = qca::longest_path(qca::prune(qca::thin(mask)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(qca::width_profile(mask, centerline));
    }
    state.SetItemsProcessed(state.iterations() * centerline.length());
}
BENCHMARK(BM_WidthProfile)->Arg(12)->Arg(28)->Unit(benchmark::kMicrosecond);

}  // namespace
