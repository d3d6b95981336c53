// Serial reference engine vs the OpenMP engine on a few resize shapes.

#include <benchmark/benchmark.h>

#include "redistplan/redistribute.hpp"

namespace rp = redistplan;

namespace {

struct Shape {
    rp::GridShape src, dst;
    int nblocks, nb;
};

const Shape kShapes[] = {
    {{2, 2}, {3, 4}, 48, 16},  // expansion
    {{5, 8}, {2, 4}, 80, 8},   // shrink
    {{2, 4}, {5, 8}, 80, 8},   // 8 -> 40
    {{4, 4}, {1, 2}, 32, 16},  // contended shrink
};

template <bool Parallel>
void BM_Execute(benchmark::State& state) {
    const auto& s = kShapes[state.range(0)];
    const auto desc = rp::BlockDesc::from_blocks(s.nblocks, s.nb);
    const auto pl = rp::plan({s.src, s.dst, desc});
    const auto sources = rp::distribute_initial(desc, s.src);
    for (auto _ : state) {
        auto r = Parallel ? rp::execute(pl, sources) : rp::execute_serial(pl, sources);
        benchmark::DoNotOptimize(r.stores.data());
    }
    state.SetLabel(rp::to_string(s.src) + "->" + rp::to_string(s.dst));
    state.SetBytesProcessed(state.iterations() * static_cast<int64_t>(s.nblocks) * s.nblocks * s.nb * s.nb *
                            static_cast<int64_t>(sizeof(double)));
}

}  // namespace

BENCHMARK(BM_Execute<false>)->Name("execute_serial")->DenseRange(0, 3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Execute<true>)->Name("execute_openmp")->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
