#include "spikeforge/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "spikeforge/rng.hpp"

namespace spikeforge {

namespace {

/// Exact encoded size of one Bernoulli(density) matrix drawn from
/// substream (seed, trial). Row-major draws, one per cell.
uint64_t sample_indexed_bits(const TableDims& dims, double density, uint64_t seed,
                             uint32_t trial) {
    SplitMix64 rng(seed, trial);
    ConnectivityMatrix m(dims);
    for (uint32_t i = 0; i < dims.inputs; ++i) {
        for (uint32_t j = 0; j < dims.neurons; ++j) {
            if (rng.uniform01() < density) m.connect(i, j, 0.0);
        }
    }
    return encode_indexed(m).memory_bits();
}

void check_mc_args(const TableDims& dims, double density, uint32_t trials) {
    dims.validate();
    if (!(density >= 0.0 && density <= 1.0))
        throw std::invalid_argument("density must be in [0, 1]");
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
}

}  // namespace

double expected_indexed_bits_serial(const TableDims& dims, double density, uint32_t trials,
                                    uint64_t seed) {
    check_mc_args(dims, density, trials);
    uint64_t total = 0;
    for (uint32_t k = 0; k < trials; ++k) total += sample_indexed_bits(dims, density, seed, k);
    return double(total) / double(trials);
}

double expected_indexed_bits(const TableDims& dims, double density, uint32_t trials,
                             uint64_t seed) {
    check_mc_args(dims, density, trials);
    uint64_t total = 0;
#pragma omp parallel for schedule(dynamic) reduction(+ : total)
    for (int64_t k = 0; k < int64_t(trials); ++k)
        total += sample_indexed_bits(dims, density, seed, uint32_t(k));
    return double(total) / double(trials);
}

std::vector<CurveSample> memory_curve(const TableDims& dims, std::span<const double> densities,
                                      uint32_t trials, uint64_t seed) {
    dims.validate();
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    const uint64_t crossbar = dims.cells() * dims.weight_bits;

    // Integer per-sample sizes, reduced serially, so the curve is identical
    // whatever the thread count.
    std::vector<uint64_t> bits(densities.size() * trials);
    const int64_t total = int64_t(bits.size());
#pragma omp parallel for schedule(dynamic)
    for (int64_t k = 0; k < total; ++k) {
        const size_t di = size_t(k) / trials;
        bits[size_t(k)] = sample_indexed_bits(dims, densities[di], seed,
                                              uint32_t(size_t(k) % trials));
    }

    std::vector<CurveSample> out(densities.size());
    for (size_t di = 0; di < out.size(); ++di) {
        uint64_t sum = 0;
        long double sum_sq = 0.0L;
        for (uint32_t k = 0; k < trials; ++k) {
            const uint64_t b = bits[di * trials + k];
            sum += b;
            sum_sq += (long double)(b) * (long double)(b);
        }
        auto& s = out[di];
        s.density = densities[di];
        s.crossbar_bits = crossbar;
        const long double mean = (long double)(sum) / trials;
        const long double var =
            std::max(0.0L, sum_sq / trials - mean * mean);
        s.indexed_mean = double(mean);
        s.indexed_stddev = double(std::sqrt(var));
    }
    return out;
}

std::optional<double> critical_density(const TableDims& dims, double tolerance,
                                       uint32_t trials, uint64_t seed) {
    dims.validate();
    if (!(tolerance > 0)) throw std::invalid_argument("tolerance must be > 0");
    const double target = double(dims.cells() * dims.weight_bits);

    // The d = 0 cost is exact: just the pointer table. Above the crossbar
    // cost it can only grow, so there is no crossover.
    const double floor_bits = double(uint64_t(dims.inputs + 1) * pointer_field_bits(dims));
    if (floor_bits >= target) return std::nullopt;

    double lo = 0.0, hi = 1.0;
    while (hi - lo > tolerance) {
        const double mid = 0.5 * (lo + hi);
        if (expected_indexed_bits(dims, mid, trials, seed) < target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double expected_runs_per_row(uint32_t neurons, double density) {
    return double(neurons - 1) * density * (1.0 - density) + (1.0 - density);
}

DiffStats diff_stats(std::span<const double> weights_forward,
                     std::span<const double> weights_oracle) {
    if (weights_forward.size() != weights_oracle.size())
        throw std::invalid_argument("diff_stats: synapse sets differ in size");
    DiffStats st;
    st.synapses = weights_forward.size();
    st.diffs.resize(st.synapses);
    if (st.synapses == 0) return st;

    for (size_t s = 0; s < st.synapses; ++s)
        st.diffs[s] = weights_oracle[s] - weights_forward[s];

    uint64_t gt4 = 0;
    st.max_diff = st.diffs[0];
    st.min_diff = st.diffs[0];
    for (double e : st.diffs) {
        st.max_diff = std::max(st.max_diff, e);
        st.min_diff = std::min(st.min_diff, e);
        if (e > 4.0) ++gt4;
        if (e < 0.0) st.all_nonneg = false;
    }
    st.frac_gt_4 = double(gt4) / double(st.synapses);

    std::vector<double> sorted(st.diffs);
    std::sort(sorted.begin(), sorted.end());
    const auto quantile = [&](double q) {
        const size_t idx = std::min(sorted.size() - 1, size_t(q * double(sorted.size())));
        return sorted[idx];
    };
    st.p50 = quantile(0.50);
    st.p90 = quantile(0.90);
    st.p99 = quantile(0.99);

    const int64_t lo_bin = int64_t(std::floor(st.min_diff));
    const int64_t hi_bin = int64_t(std::floor(st.max_diff));
    st.histogram.resize(size_t(hi_bin - lo_bin + 1));
    for (size_t b = 0; b < st.histogram.size(); ++b) st.histogram[b].lo = lo_bin + int64_t(b);
    for (double e : st.diffs) ++st.histogram[size_t(int64_t(std::floor(e)) - lo_bin)].count;
    return st;
}

DivergenceSeries trajectory_compare(const Trajectory& forward, const Trajectory& oracle) {
    if (forward.ticks != oracle.ticks || forward.synapses != oracle.synapses)
        throw std::invalid_argument("trajectory_compare: sampling grids differ");
    DivergenceSeries out;
    out.ticks = forward.ticks;
    out.synapses = forward.synapses;
    out.sup_per_synapse.assign(forward.synapses.size(), 0.0);
    out.abs_diff.resize(forward.values.size());
    for (size_t row = 0; row < forward.values.size(); ++row) {
        out.abs_diff[row].resize(forward.synapses.size());
        for (size_t s = 0; s < forward.synapses.size(); ++s) {
            const double d = std::abs(oracle.values[row][s] - forward.values[row][s]);
            out.abs_diff[row][s] = d;
            out.sup_per_synapse[s] = std::max(out.sup_per_synapse[s], d);
        }
    }
    return out;
}

}  // namespace spikeforge
