#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "spikeforge/connectivity.hpp"
#include "spikeforge/engine.hpp"
#include "spikeforge/kernel.hpp"
#include "spikeforge/stimulus.hpp"

namespace spikeforge {

struct CoreConfig {
    TableDims dims;
    TableKind table_kind = TableKind::indexed;
    std::optional<StdpKernel> kernel;  // required; optional only for aggregate init
    WeightBounds bounds;
    double tick_ms = 1.0;
    uint32_t refractory_ticks = 0;  // stimulus-side; recorded for exactness reporting
    uint32_t routing_delay = 1;     // ticks from a post spike to delivery

    void validate() const;
};

/// Spike destination: an input line of some core.
struct Destination {
    uint32_t core = 0;
    uint32_t input = 0;
    bool operator==(const Destination&) const = default;
};

/// Per post-synaptic neuron, where its spikes are delivered.
using RoutingTable = std::vector<std::vector<Destination>>;

/// Pending (core, input) spike deliveries bucketed by tick. Duplicate
/// deliveries to one input in one tick collapse: an input either sees a
/// spike in a tick or it does not.
class EventQueue {
public:
    void push(uint64_t tick, uint32_t core, uint32_t input);
    /// Events scheduled for `tick`, sorted by (core, input), deduplicated.
    std::vector<std::pair<uint32_t, uint32_t>> take(uint64_t tick);
    bool empty() const { return buckets_.empty(); }
    /// Total deliveries ever enqueued (never decremented).
    uint64_t pushed() const { return total_; }

private:
    std::map<uint64_t, std::vector<std::pair<uint32_t, uint32_t>>> buckets_;
    uint64_t total_ = 0;
};

/// One neurosynaptic core: a weight table in the configured layout, the
/// selected plasticity engines fed identical events, and the routing table
/// for its post-synaptic spikes.
class Core {
public:
    Core(CoreConfig config, ConnectivityMatrix matrix, std::vector<EngineKind> engines,
         RoutingTable routing = {});

    const CoreConfig& config() const { return config_; }
    const SynapseGraph& graph() const { return *graph_; }
    const ConnectivityMatrix& matrix() const { return matrix_; }
    const RoutingTable& routing() const { return routing_; }
    WeightTable& table() { return *table_; }
    const WeightTable& table() const { return *table_; }

    StdpEngine* find_engine(EngineKind kind);
    const StdpEngine* find_engine(EngineKind kind) const;
    std::span<const StdpEngine> engines() const { return engines_; }

    /// Advance one tick. `t` must be strictly increasing across calls.
    /// Inputs and injected post spikes must be sorted ascending; returns the
    /// post spikes emitted this tick (the injected ones, since spikes are
    /// produced externally).
    std::vector<uint32_t> step(uint64_t t, std::span<const uint32_t> input_events,
                               std::span<const uint32_t> post_injections);

    bool any_pre_timer_active() const;

    /// Write the lead engine's current weights back into the storage table.
    void store_weights(EngineKind kind);

    MemoryReport memory() const { return memory_report(matrix_); }

private:
    CoreConfig config_;
    ConnectivityMatrix matrix_;
    // heap-allocated: engines keep a pointer into it, and cores move when a
    // vector of them grows
    std::unique_ptr<SynapseGraph> graph_;
    std::unique_ptr<WeightTable> table_;
    RoutingTable routing_;
    std::vector<StdpEngine> engines_;
    int64_t last_tick_ = -1;
};

/// Enqueue routed deliveries for spikes emitted at `tick`.
void route(const RoutingTable& routing, std::span<const uint32_t> post_spikes, uint64_t tick,
           uint32_t delay, size_t core_count, EventQueue& queue);

struct EngineOutcome {
    EngineKind kind;
    std::vector<double> final_weights;
    Trajectory trajectory;
    uint64_t saturation_events = 0;
};

struct CoreOutcome {
    std::vector<EngineOutcome> engines;
    MemoryReport memory;
};

struct ExperimentReport {
    std::vector<CoreOutcome> cores;
    uint64_t stimulus_ticks = 0;
    uint64_t drain_ticks = 0;
    uint64_t delivered_events = 0;
};

struct SystemRunOptions {
    uint32_t sample_period = 0;
    std::vector<uint32_t> sample_synapses;  // applied to every core
};

/// Tick-synchronous run over one or more cores. Stimulus trains inject
/// input events and post spikes directly; post spikes are additionally
/// routed through each core's routing table with the configured delay.
/// After the stimulus horizon the system keeps ticking until the event
/// queue is empty and every input timer has expired, so no deferred causal
/// update is pending in the report.
ExperimentReport run_system(std::vector<Core>& cores, const std::vector<SpikeTrace>& stimulus,
                            uint64_t duration_ticks, const SystemRunOptions& opts = {});

}  // namespace spikeforge
