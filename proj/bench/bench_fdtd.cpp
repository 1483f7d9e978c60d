#include <benchmark/benchmark.h>

#include <vector>

#include "roomtune/fdtd.hpp"
#include "roomtune/geometry.hpp"

using namespace roomtune;

namespace {

struct State {
    kernels::Stencil stencil;
    std::vector<double> cur, prev;

    explicit State(double dx) {
        const auto grid = box_to_grid(make_box_room("27", 3.60, 2.60, 2.35), dx);
        stencil = kernels::build_stencil(grid, kMaxCourant3d);
        cur.assign(stencil.mask.size(), 0.0);
        prev.assign(stencil.mask.size(), 0.0);
        for (std::size_t i = 0; i < cur.size(); ++i) cur[i] = stencil.mask[i] * static_cast<double>(i % 7) * 0.1;
    }
};

template <void (*Step)(const kernels::Stencil&, std::span<const double>, std::span<double>)>
void BM_step(benchmark::State& st) {
    State s(static_cast<double>(st.range(0)) / 1000.0);
    for (auto _ : st) {
        Step(s.stencil, s.cur, s.prev);
        s.cur.swap(s.prev);
        benchmark::DoNotOptimize(s.cur.data());
    }
    st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(s.cur.size()));
}

}  // namespace

BENCHMARK(BM_step<kernels::step_serial>)->Name("step_serial")->Arg(50)->Arg(25);
BENCHMARK(BM_step<kernels::step_parallel>)->Name("step_parallel")->Arg(50)->Arg(25);

BENCHMARK_MAIN();
