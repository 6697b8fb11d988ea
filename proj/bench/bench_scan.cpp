// Serial reference against the OpenMP kernels: grid scan and sigma_min grid.

#include <benchmark/benchmark.h>

#include "wshift/oracle.hpp"
#include "wshift/spectrum.hpp"

using namespace wshift;

namespace {

ShiftModel lemniscate() { return ShiftModel(SequenceSpec::constant(1.0), SequenceSpec::periodic({1.0, -1.0})); }

ShiftModel random_weights() {
    RandomSeq r;
    r.seed = 7;
    r.first = -64;
    r.last = 64;
    r.modulus_lo = 0.5;
    r.modulus_hi = 2.0;
    r.left = 1.0;
    r.right = 1.0;
    return ShiftModel(SequenceSpec::random(r), SequenceSpec::constant(0.3));
}

void scan_case(benchmark::State& state, const ShiftModel& m, Execution execution) {
    ScanParams p;
    p.nx = p.ny = static_cast<int>(state.range(0));
    p.max_depth = 3;
    p.execution = execution;
    std::size_t points = 0;
    for (auto _ : state) {
        const auto g = scan(m, p);
        points = g.samples.size();
        benchmark::DoNotOptimize(g.leaves.data());
    }
    state.counters["points"] = static_cast<double>(points);
}

void BM_ScanClosedFormSerial(benchmark::State& s) { scan_case(s, lemniscate(), Execution::serial); }
void BM_ScanClosedFormParallel(benchmark::State& s) { scan_case(s, lemniscate(), Execution::parallel); }
void BM_ScanTruncatedSerial(benchmark::State& s) { scan_case(s, random_weights(), Execution::serial); }
void BM_ScanTruncatedParallel(benchmark::State& s) { scan_case(s, random_weights(), Execution::parallel); }

void sigma_case(benchmark::State& state, Execution execution) {
    const auto m = truncate(lemniscate(), static_cast<int>(state.range(0)), TruncationBoundary::zero, 0);
    const Box box{-2, 2, -1.5, 1.5};
    for (auto _ : state) benchmark::DoNotOptimize(sigma_min_grid(m, box, 16, 12, execution).values.data());
}

void BM_SigmaGridSerial(benchmark::State& s) { sigma_case(s, Execution::serial); }
void BM_SigmaGridParallel(benchmark::State& s) { sigma_case(s, Execution::parallel); }

}  // namespace

BENCHMARK(BM_ScanClosedFormSerial)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScanClosedFormParallel)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScanTruncatedSerial)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScanTruncatedParallel)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SigmaGridSerial)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SigmaGridParallel)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
