#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "spikeforge/connectivity.hpp"
#include "spikeforge/kernel.hpp"
#include "spikeforge/timer_bank.hpp"
#include "spikeforge/trace.hpp"

namespace spikeforge {

/// Row-major (forward) and column-major (reverse) indices over the present
/// connections of a matrix, with real-valued simulation weights. Synapse s
/// lives in row `input_of(s)` targeting `col[s]`; rows list neurons in
/// ascending order, so synapse ids are row-major.
struct SynapseGraph {
    TableDims dims;
    std::vector<uint64_t> row_offset;   // inputs + 1
    std::vector<uint32_t> col;          // target neuron per synapse
    std::vector<double> initial_weight;
    std::vector<uint64_t> col_offset;   // neurons + 1
    std::vector<uint32_t> csc_synapse;  // synapse ids grouped by neuron, ascending input
    std::vector<uint32_t> csc_input;    // source input per csc entry

    static SynapseGraph from_matrix(const ConnectivityMatrix& m);

    size_t synapse_count() const { return col.size(); }
    uint32_t input_of(uint32_t synapse) const;

    struct Pair {
        uint32_t pre, post;
    };
    Pair pair_of(uint32_t synapse) const { return {input_of(synapse), col[synapse]}; }
    /// Synapse id for (input, neuron); -1 when absent.
    int64_t find(uint32_t input, uint32_t neuron) const;
};

enum class EngineKind { forward, oracle };

/// Event-driven nearest-neighbor STDP over a synapse graph.
///
/// The oracle engine updates causally at every post-synaptic spike via
/// reverse lookup. The forward engine only ever reads rows (forward lookup):
/// acausal updates fire on arriving input spikes, and causal updates are
/// deferred to the moment the input's timer is displaced by a newer spike or
/// expires. Both engines share the same arithmetic and saturation, so where
/// they agree they agree bit for bit.
///
/// Within one tick the caller must keep the canonical order: input spikes in
/// ascending input index, then post spikes in ascending neuron index, then
/// one end_tick().
class StdpEngine {
public:
    StdpEngine(EngineKind kind, const SynapseGraph& graph, const StdpKernel& kernel,
               WeightBounds bounds);

    EngineKind kind() const { return kind_; }
    const TimerBank& timers() const { return timers_; }
    std::span<const double> weights() const { return weights_; }
    uint64_t saturation_events() const { return saturations_; }

    void on_pre_spike(uint32_t input);
    void on_post_spike(uint32_t neuron);
    void end_tick();

private:
    void apply(uint32_t synapse, double dw);
    void causal_row_update(uint32_t input, uint32_t displaced_timer);

    EngineKind kind_;
    const SynapseGraph* graph_;
    StdpKernel kernel_;
    WeightBounds bounds_;
    std::vector<double> weights_;
    TimerBank timers_;
    std::vector<uint32_t> expired_;
    uint64_t saturations_ = 0;
};

/// Sampled weight series for a set of synapses on a common tick grid.
struct Trajectory {
    std::vector<uint64_t> ticks;
    std::vector<uint32_t> synapses;
    std::vector<std::vector<double>> values;  // [sample][synapse]
};

struct EngineRunOptions {
    uint64_t duration_ticks = 0;  // 0: run to the last spike in the trace
    uint32_t sample_period = 0;   // 0: no trajectory
    std::vector<uint32_t> sample_synapses;  // empty + period > 0: all synapses
};

struct EngineRunResult {
    std::vector<double> final_weights;
    Trajectory trajectory;
    uint64_t saturation_events = 0;
    uint64_t stimulus_ticks = 0;
    uint64_t drain_ticks = 0;
};

/// Drive one engine over an externally supplied trace, then run silent ticks
/// until every input timer has expired so no deferred causal update is
/// still pending at the end.
EngineRunResult run_engine(EngineKind kind, const SpikeTrace& trace, const SynapseGraph& graph,
                           const StdpKernel& kernel, WeightBounds bounds,
                           const EngineRunOptions& opts = {});

/// Offline nearest-neighbor reference: walks each synapse's pre/post trains
/// in tick order, pairing every post spike causally with the latest pre
/// spike at or before it and every pre spike acausally with the latest post
/// spike strictly before it (equal-tick pairs contribute nothing). Applied
/// with the same arithmetic as the engines, so results are comparable bit
/// for bit. Synapses are independent; the default entry point fans out with
/// OpenMP and matches the serial one exactly.
std::vector<double> trace_oracle(const SpikeTrace& trace, const SynapseGraph& graph,
                                 const StdpKernel& kernel, WeightBounds bounds);
std::vector<double> trace_oracle_serial(const SpikeTrace& trace, const SynapseGraph& graph,
                                        const StdpKernel& kernel, WeightBounds bounds);

}  // namespace spikeforge
