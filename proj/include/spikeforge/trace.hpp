#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace spikeforge {

/// Externally supplied spike times, one sorted train per input line and one
/// per post-synaptic neuron. Ticks within a train are strictly increasing.
struct SpikeTrace {
    std::vector<std::vector<uint32_t>> pre;   // per input
    std::vector<std::vector<uint32_t>> post;  // per neuron

    SpikeTrace() = default;
    SpikeTrace(uint32_t inputs, uint32_t neurons) : pre(inputs), post(neurons) {}

    /// One past the last spike tick; 0 when the trace is empty.
    uint64_t end_tick() const;
    uint64_t spike_count() const;
    void validate() const;  // strict ordering per train
};

/// CSV rows "source,tick" ordered by tick, then inputs before neurons,
/// then index. Sources are written as pre:<i> and post:<j>.
void save_spike_trace(std::ostream& out, const SpikeTrace& trace);

}  // namespace spikeforge
