#include "spikeforge/core.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace spikeforge {

void CoreConfig::validate() const {
    dims.validate();
    if (!kernel) throw ConfigError("core: kernel is required");
    bounds.validate();
    if (!(tick_ms > 0)) throw ConfigError("core: tick_ms must be > 0");
    if (routing_delay < 1) throw ConfigError("core: routing delay must be >= 1 tick");
}

void EventQueue::push(uint64_t tick, uint32_t core, uint32_t input) {
    buckets_[tick].emplace_back(core, input);
    ++total_;
}

std::vector<std::pair<uint32_t, uint32_t>> EventQueue::take(uint64_t tick) {
    const auto it = buckets_.find(tick);
    if (it == buckets_.end()) return {};
    auto events = std::move(it->second);
    buckets_.erase(it);
    std::sort(events.begin(), events.end());
    events.erase(std::unique(events.begin(), events.end()), events.end());
    return events;
}

Core::Core(CoreConfig config, ConnectivityMatrix matrix, std::vector<EngineKind> engines,
           RoutingTable routing)
    : config_(std::move(config)),
      matrix_(std::move(matrix)),
      graph_(std::make_unique<SynapseGraph>(SynapseGraph::from_matrix(matrix_))),
      routing_(std::move(routing)) {
    config_.validate();
    if (matrix_.dims() != config_.dims)
        throw ConfigError("core: matrix dimensions disagree with the core configuration");
    if (engines.empty()) throw ConfigError("core: at least one engine must be selected");
    if (!routing_.empty() && routing_.size() != config_.dims.neurons)
        throw ConfigError("core: routing table must have one entry per neuron");
    table_ = build_table(config_.table_kind, matrix_);
    engines_.reserve(engines.size());
    for (EngineKind k : engines)
        engines_.emplace_back(k, *graph_, *config_.kernel, config_.bounds);
}

StdpEngine* Core::find_engine(EngineKind kind) {
    for (auto& e : engines_)
        if (e.kind() == kind) return &e;
    return nullptr;
}

const StdpEngine* Core::find_engine(EngineKind kind) const {
    for (const auto& e : engines_)
        if (e.kind() == kind) return &e;
    return nullptr;
}

std::vector<uint32_t> Core::step(uint64_t t, std::span<const uint32_t> input_events,
                                 std::span<const uint32_t> post_injections) {
    if (int64_t(t) <= last_tick_) throw std::logic_error("core: ticks must strictly increase");
    last_tick_ = int64_t(t);
    for (uint32_t input : input_events) {
        if (input >= config_.dims.inputs) throw std::out_of_range("event input out of range");
        for (auto& e : engines_) e.on_pre_spike(input);
    }
    for (uint32_t neuron : post_injections) {
        if (neuron >= config_.dims.neurons)
            throw std::out_of_range("injected neuron out of range");
        for (auto& e : engines_) e.on_post_spike(neuron);
    }
    for (auto& e : engines_) e.end_tick();
    return std::vector<uint32_t>(post_injections.begin(), post_injections.end());
}

bool Core::any_pre_timer_active() const {
    for (const auto& e : engines_)
        if (e.timers().any_pre_active()) return true;
    return false;
}

void Core::store_weights(EngineKind kind) {
    const StdpEngine* e = find_engine(kind);
    if (!e) throw ConfigError("core: requested engine is not hosted by this core");
    for (uint32_t i = 0; i < config_.dims.inputs; ++i) {
        for (uint64_t s = graph_->row_offset[i]; s < graph_->row_offset[i + 1]; ++s)
            table_->set_weight(i, graph_->col[s], e->weights()[s]);
    }
}

void route(const RoutingTable& routing, std::span<const uint32_t> post_spikes, uint64_t tick,
           uint32_t delay, size_t core_count, EventQueue& queue) {
    if (delay < 1) throw std::invalid_argument("route: delay must be >= 1 tick");
    if (routing.empty()) return;
    for (uint32_t neuron : post_spikes) {
        if (neuron >= routing.size()) throw std::out_of_range("routed neuron out of range");
        for (const Destination& d : routing[neuron]) {
            if (d.core >= core_count)
                throw std::out_of_range("routing destination names a missing core");
            queue.push(tick + delay, d.core, d.input);
        }
    }
}

ExperimentReport run_system(std::vector<Core>& cores, const std::vector<SpikeTrace>& stimulus,
                            uint64_t duration_ticks, const SystemRunOptions& opts) {
    if (stimulus.size() != cores.size())
        throw std::invalid_argument("run_system: one stimulus trace per core required");
    for (size_t c = 0; c < cores.size(); ++c) {
        if (stimulus[c].pre.size() != cores[c].config().dims.inputs ||
            stimulus[c].post.size() != cores[c].config().dims.neurons)
            throw std::out_of_range("stimulus sources do not match core geometry");
        stimulus[c].validate();
    }

    const bool sampling = opts.sample_period > 0;

    ExperimentReport report;
    report.cores.resize(cores.size());
    std::vector<std::vector<uint32_t>> sampled(cores.size());
    for (size_t c = 0; c < cores.size(); ++c) {
        report.cores[c].memory = cores[c].memory();
        for (const auto& e : cores[c].engines())
            report.cores[c].engines.push_back({e.kind(), {}, {}, 0});
        if (sampling) {
            sampled[c] = opts.sample_synapses;
            for (uint32_t s : sampled[c])
                if (s >= cores[c].graph().synapse_count())
                    throw std::out_of_range("sampled synapse out of range");
            if (sampled[c].empty()) {
                sampled[c].resize(cores[c].graph().synapse_count());
                std::iota(sampled[c].begin(), sampled[c].end(), 0u);
            }
            for (size_t k = 0; k < report.cores[c].engines.size(); ++k)
                report.cores[c].engines[k].trajectory.synapses = sampled[c];
        }
    }

    const auto record = [&](uint64_t tick) {
        for (size_t c = 0; c < cores.size(); ++c) {
            size_t k = 0;
            for (const auto& e : cores[c].engines()) {
                auto& traj = report.cores[c].engines[k++].trajectory;
                traj.ticks.push_back(tick);
                auto& row = traj.values.emplace_back();
                row.reserve(sampled[c].size());
                for (uint32_t s : sampled[c]) row.push_back(e.weights()[s]);
            }
        }
    };

    // per-core cursors into the stimulus trains
    std::vector<std::vector<size_t>> pre_cursor(cores.size()), post_cursor(cores.size());
    for (size_t c = 0; c < cores.size(); ++c) {
        pre_cursor[c].assign(stimulus[c].pre.size(), 0);
        post_cursor[c].assign(stimulus[c].post.size(), 0);
    }

    EventQueue queue;
    std::vector<uint32_t> inputs, injections;
    const auto any_active = [&] {
        for (const Core& c : cores)
            if (c.any_pre_timer_active()) return true;
        return false;
    };

    // Fixed tail of window-length silent ticks flushes every deferred causal
    // update; keep going past that only while routed events or timers remain.
    uint64_t min_drain = 0;
    if (duration_ticks > 0) {
        for (const Core& c : cores)
            min_drain = std::max<uint64_t>(min_drain, c.config().kernel->window());
    }

    uint64_t t = 0;
    uint64_t drained = 0;
    while (true) {
        const bool in_stimulus = t < duration_ticks;
        if (!in_stimulus && drained >= min_drain && queue.empty() && !any_active()) break;

        auto routed = queue.take(t);
        size_t r = 0;
        for (size_t c = 0; c < cores.size(); ++c) {
            inputs.clear();
            injections.clear();
            while (r < routed.size() && routed[r].first == c) {
                inputs.push_back(routed[r].second);
                ++r;
            }
            report.delivered_events += inputs.size();
            if (in_stimulus) {
                const SpikeTrace& tr = stimulus[c];
                for (uint32_t i = 0; i < tr.pre.size(); ++i) {
                    size_t& cur = pre_cursor[c][i];
                    if (cur < tr.pre[i].size() && tr.pre[i][cur] == t) {
                        inputs.push_back(i);
                        ++cur;
                    }
                }
                std::sort(inputs.begin(), inputs.end());
                inputs.erase(std::unique(inputs.begin(), inputs.end()), inputs.end());
                for (uint32_t j = 0; j < tr.post.size(); ++j) {
                    size_t& cur = post_cursor[c][j];
                    if (cur < tr.post[j].size() && tr.post[j][cur] == t) {
                        injections.push_back(j);
                        ++cur;
                    }
                }
            }
            const auto emitted = cores[c].step(t, inputs, injections);
            route(cores[c].routing(), emitted, t, cores[c].config().routing_delay,
                  cores.size(), queue);
        }
        if (sampling && (t + 1) % opts.sample_period == 0) record(t);
        if (!in_stimulus) ++drained;
        ++t;
    }
    if (sampling && t > 0) {
        bool have_last = false;
        for (const auto& core : report.cores)
            for (const auto& e : core.engines)
                if (!e.trajectory.ticks.empty() && e.trajectory.ticks.back() == t - 1)
                    have_last = true;
        if (!have_last) record(t - 1);
    }

    for (size_t c = 0; c < cores.size(); ++c) {
        size_t k = 0;
        for (const auto& e : cores[c].engines()) {
            auto& out = report.cores[c].engines[k++];
            out.final_weights.assign(e.weights().begin(), e.weights().end());
            out.saturation_events = e.saturation_events();
        }
    }
    report.stimulus_ticks = duration_ticks;
    report.drain_ticks = drained;
    return report;
}

}  // namespace spikeforge
