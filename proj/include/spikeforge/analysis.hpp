#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "spikeforge/connectivity.hpp"
#include "spikeforge/engine.hpp"

namespace spikeforge {

/// Monte Carlo mean of the compressed table size, in bits, over `trials`
/// matrices with independent Bernoulli(density) connections. Uses the real
/// encoder rather than a closed-form approximation; trial k draws from
/// substream (seed, k), so results are independent of the density being
/// probed and of thread count. The default entry point fans out over trials
/// with OpenMP and matches the serial one exactly (integer accumulation).
double expected_indexed_bits(const TableDims& dims, double density, uint32_t trials,
                             uint64_t seed);
double expected_indexed_bits_serial(const TableDims& dims, double density, uint32_t trials,
                                    uint64_t seed);

struct CurveSample {
    double density = 0.0;
    uint64_t crossbar_bits = 0;
    double indexed_mean = 0.0;
    double indexed_stddev = 0.0;
};

/// Memory cost of both layouts across a density grid.
std::vector<CurveSample> memory_curve(const TableDims& dims, std::span<const double> densities,
                                      uint32_t trials, uint64_t seed);

/// Density at which the expected compressed size equals the crossbar size,
/// located by bisection to within `tolerance`. Empty when the compressed
/// layout is never the cheaper one (its empty-table floor already exceeds
/// the crossbar).
std::optional<double> critical_density(const TableDims& dims, double tolerance,
                                       uint32_t trials, uint64_t seed);

/// Documented cross-check only: first-order expectation of the per-row run
/// count, (neurons-1) * d * (1-d) + (1-d). The Monte Carlo estimate above is
/// the ground truth; this ignores the omission of trailing runs.
double expected_runs_per_row(uint32_t neurons, double density);

struct HistogramBin {
    int64_t lo = 0;  // bin covers [lo, lo + 1)
    uint64_t count = 0;
};

/// Per-synapse differences e = w_oracle - w_forward.
struct DiffStats {
    size_t synapses = 0;
    double max_diff = 0.0;
    double min_diff = 0.0;
    bool all_nonneg = true;
    double frac_gt_4 = 0.0;
    double p50 = 0.0, p90 = 0.0, p99 = 0.0;
    std::vector<HistogramBin> histogram;  // unit-width bins, contiguous
    std::vector<double> diffs;            // in synapse order
};

DiffStats diff_stats(std::span<const double> weights_forward,
                     std::span<const double> weights_oracle);

/// Aligned divergence series between two trajectories on the same grid.
struct DivergenceSeries {
    std::vector<uint64_t> ticks;
    std::vector<uint32_t> synapses;
    std::vector<std::vector<double>> abs_diff;  // [sample][synapse]
    std::vector<double> sup_per_synapse;
};

DivergenceSeries trajectory_compare(const Trajectory& forward, const Trajectory& oracle);

}  // namespace spikeforge
