// Serial vs OpenMP throughput for the data-parallel kernels: the Monte Carlo
// memory estimator, the offline oracle, and batch stimulus generation.

#include <benchmark/benchmark.h>

#include "spikeforge/analysis.hpp"
#include "spikeforge/engine.hpp"
#include "spikeforge/stimulus.hpp"

namespace {

using namespace spikeforge;

void BM_expected_bits_serial(benchmark::State& state) {
    const TableDims dims{256, 256, 9};
    for (auto _ : state) {
        benchmark::DoNotOptimize(expected_indexed_bits_serial(dims, 0.5, 32, 7));
    }
}
BENCHMARK(BM_expected_bits_serial)->Unit(benchmark::kMillisecond);

void BM_expected_bits_parallel(benchmark::State& state) {
    const TableDims dims{256, 256, 9};
    for (auto _ : state) {
        benchmark::DoNotOptimize(expected_indexed_bits(dims, 0.5, 32, 7));
    }
}
BENCHMARK(BM_expected_bits_parallel)->Unit(benchmark::kMillisecond);

struct OracleFixture {
    ConnectivityMatrix matrix{TableDims{64, 64, 9}};
    SynapseGraph graph;
    StdpKernel kernel = StdpKernel::ramp(20, 20, 1.0);
    WeightBounds bounds{-256.0, 255.0};
    SpikeTrace trace;

    OracleFixture() {
        for (uint32_t i = 0; i < 64; ++i)
            for (uint32_t j = 0; j < 64; ++j) matrix.connect(i, j, 0.0);
        graph = SynapseGraph::from_matrix(matrix);
        StimulusConfig cfg;
        cfg.rate_hz = 10.0;
        cfg.refractory_ticks = 5;
        cfg.duration_ticks = 60000;
        cfg.seed = 1;
        trace = build_trace(cfg, 64, 64);
    }
};

void BM_trace_oracle_serial(benchmark::State& state) {
    const OracleFixture fx;
    for (auto _ : state) {
        benchmark::DoNotOptimize(trace_oracle_serial(fx.trace, fx.graph, fx.kernel, fx.bounds));
    }
}
BENCHMARK(BM_trace_oracle_serial)->Unit(benchmark::kMillisecond);

void BM_trace_oracle_parallel(benchmark::State& state) {
    const OracleFixture fx;
    for (auto _ : state) {
        benchmark::DoNotOptimize(trace_oracle(fx.trace, fx.graph, fx.kernel, fx.bounds));
    }
}
BENCHMARK(BM_trace_oracle_parallel)->Unit(benchmark::kMillisecond);

void BM_build_trace_serial(benchmark::State& state) {
    StimulusConfig cfg;
    cfg.rate_hz = 10.0;
    cfg.refractory_ticks = 5;
    cfg.duration_ticks = 1000000;
    cfg.seed = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_trace_serial(cfg, 64, 64));
    }
}
BENCHMARK(BM_build_trace_serial)->Unit(benchmark::kMillisecond);

void BM_build_trace_parallel(benchmark::State& state) {
    StimulusConfig cfg;
    cfg.rate_hz = 10.0;
    cfg.refractory_ticks = 5;
    cfg.duration_ticks = 1000000;
    cfg.seed = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_trace(cfg, 64, 64));
    }
}
BENCHMARK(BM_build_trace_parallel)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
