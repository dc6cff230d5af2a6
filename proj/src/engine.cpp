#include "spikeforge/engine.hpp"

#include <algorithm>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace spikeforge {

// -- SpikeTrace ---------------------------------------------------------

uint64_t SpikeTrace::end_tick() const {
    uint64_t end = 0;
    for (const auto& train : pre)
        if (!train.empty()) end = std::max(end, uint64_t(train.back()) + 1);
    for (const auto& train : post)
        if (!train.empty()) end = std::max(end, uint64_t(train.back()) + 1);
    return end;
}

uint64_t SpikeTrace::spike_count() const {
    uint64_t n = 0;
    for (const auto& train : pre) n += train.size();
    for (const auto& train : post) n += train.size();
    return n;
}

void SpikeTrace::validate() const {
    const auto check = [](const std::vector<uint32_t>& train) {
        for (size_t k = 1; k < train.size(); ++k) {
            if (train[k] <= train[k - 1])
                throw std::invalid_argument("spike train ticks must be strictly increasing");
        }
    };
    for (const auto& train : pre) check(train);
    for (const auto& train : post) check(train);
}

void save_spike_trace(std::ostream& out, const SpikeTrace& trace) {
    struct Row {
        uint32_t tick;
        uint8_t kind;  // 0 pre, 1 post
        uint32_t index;
    };
    std::vector<Row> rows;
    rows.reserve(trace.spike_count());
    for (uint32_t i = 0; i < trace.pre.size(); ++i)
        for (uint32_t t : trace.pre[i]) rows.push_back({t, 0, i});
    for (uint32_t j = 0; j < trace.post.size(); ++j)
        for (uint32_t t : trace.post[j]) rows.push_back({t, 1, j});
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        return std::tie(a.tick, a.kind, a.index) < std::tie(b.tick, b.kind, b.index);
    });
    out << "source,tick\n";
    for (const Row& r : rows)
        out << (r.kind ? "post:" : "pre:") << r.index << ',' << r.tick << '\n';
}

// -- SynapseGraph -------------------------------------------------------

SynapseGraph SynapseGraph::from_matrix(const ConnectivityMatrix& m) {
    SynapseGraph g;
    g.dims = m.dims();
    const uint32_t inputs = g.dims.inputs;
    const uint32_t neurons = g.dims.neurons;

    g.row_offset.assign(inputs + 1, 0);
    g.col.reserve(m.connection_count());
    g.initial_weight.reserve(m.connection_count());
    for (uint32_t i = 0; i < inputs; ++i) {
        m.for_each_in_row(i, [&](uint32_t j, double w) {
            g.col.push_back(j);
            g.initial_weight.push_back(w);
        });
        g.row_offset[i + 1] = g.col.size();
    }

    // reverse (column) index for the oracle engine
    g.col_offset.assign(neurons + 1, 0);
    for (uint32_t j : g.col) ++g.col_offset[j + 1];
    for (uint32_t j = 0; j < neurons; ++j) g.col_offset[j + 1] += g.col_offset[j];
    g.csc_synapse.assign(g.col.size(), 0);
    g.csc_input.assign(g.col.size(), 0);
    std::vector<uint64_t> fill(g.col_offset.begin(), g.col_offset.end() - 1);
    for (uint32_t i = 0; i < inputs; ++i) {
        for (uint64_t s = g.row_offset[i]; s < g.row_offset[i + 1]; ++s) {
            const uint32_t j = g.col[s];
            g.csc_synapse[fill[j]] = uint32_t(s);
            g.csc_input[fill[j]] = i;
            ++fill[j];
        }
    }
    return g;
}

uint32_t SynapseGraph::input_of(uint32_t synapse) const {
    const auto it = std::upper_bound(row_offset.begin(), row_offset.end(), uint64_t(synapse));
    return uint32_t(it - row_offset.begin() - 1);
}

int64_t SynapseGraph::find(uint32_t input, uint32_t neuron) const {
    const auto first = col.begin() + ptrdiff_t(row_offset[input]);
    const auto last = col.begin() + ptrdiff_t(row_offset[input + 1]);
    const auto it = std::lower_bound(first, last, neuron);
    if (it == last || *it != neuron) return -1;
    return it - col.begin();
}

// -- StdpEngine ---------------------------------------------------------

namespace {

/// One saturating weight update. Zero deltas are skipped so that an
/// out-of-window pairing leaves the stored bits untouched.
inline void saturate_add(double& w, double dw, const WeightBounds& b, uint64_t& saturations) {
    if (dw == 0.0) return;
    double v = w + dw;
    if (v > b.hi) {
        v = b.hi;
        ++saturations;
    } else if (v < b.lo) {
        v = b.lo;
        ++saturations;
    }
    w = v;
}

}  // namespace

StdpEngine::StdpEngine(EngineKind kind, const SynapseGraph& graph, const StdpKernel& kernel,
                       WeightBounds bounds)
    : kind_(kind),
      graph_(&graph),
      kernel_(kernel),
      bounds_(bounds),
      weights_(graph.initial_weight),
      timers_(graph.dims.inputs, graph.dims.neurons, kernel.window()) {
    bounds_.validate();
}

void StdpEngine::apply(uint32_t synapse, double dw) {
    saturate_add(weights_[synapse], dw, bounds_, saturations_);
}

/// Causal sweep of one row: pair the input's pending spike with every
/// connected neuron whose timer outlasts `displaced_timer`. For a timer
/// displaced by a fresh spike (case 2) that is the old timer value; at
/// expiry it is zero, which makes dt exactly the post timer value.
void StdpEngine::causal_row_update(uint32_t input, uint32_t displaced_timer) {
    for (uint64_t s = graph_->row_offset[input]; s < graph_->row_offset[input + 1]; ++s) {
        const uint32_t tj = timers_.post(graph_->col[s]);
        if (tj > displaced_timer)
            apply(uint32_t(s), kernel_.at(int64_t(tj) - int64_t(displaced_timer)));
    }
}

void StdpEngine::on_pre_spike(uint32_t input) {
    if (input >= graph_->dims.inputs) throw std::out_of_range("input index out of range");
    if (kind_ == EngineKind::forward) {
        const uint32_t ti = timers_.pre(input);
        if (ti > 0) causal_row_update(input, ti);  // catch up before the timer is displaced
    }
    // acausal updates against every neuron that spiked within the window
    const int64_t window = timers_.window();
    for (uint64_t s = graph_->row_offset[input]; s < graph_->row_offset[input + 1]; ++s) {
        const uint32_t tj = timers_.post(graph_->col[s]);
        if (tj > 0) apply(uint32_t(s), kernel_.at(int64_t(tj) - window));
    }
    timers_.arm_pre(input);
}

void StdpEngine::on_post_spike(uint32_t neuron) {
    if (neuron >= graph_->dims.neurons) throw std::out_of_range("neuron index out of range");
    if (kind_ == EngineKind::oracle) {
        // immediate causal updates, reverse lookup over the column
        const int64_t window = timers_.window();
        for (uint64_t k = graph_->col_offset[neuron]; k < graph_->col_offset[neuron + 1]; ++k) {
            const uint32_t ti = timers_.pre(graph_->csc_input[k]);
            if (ti > 0) apply(graph_->csc_synapse[k], kernel_.at(window - int64_t(ti)));
        }
    }
    timers_.arm_post(neuron);
}

void StdpEngine::end_tick() {
    expired_.clear();
    timers_.tick(expired_);
    if (kind_ == EngineKind::forward) {
        for (uint32_t input : expired_) causal_row_update(input, 0);
    }
}

// -- run_engine ---------------------------------------------------------

namespace {

struct Event {
    uint32_t tick;
    uint8_t phase;  // 0 pre, 1 post
    uint32_t index;
};

std::vector<Event> collect_events(const SpikeTrace& trace, uint64_t horizon) {
    std::vector<Event> evs;
    evs.reserve(trace.spike_count());
    for (uint32_t i = 0; i < trace.pre.size(); ++i)
        for (uint32_t t : trace.pre[i])
            if (t < horizon) evs.push_back({t, 0, i});
    for (uint32_t j = 0; j < trace.post.size(); ++j)
        for (uint32_t t : trace.post[j])
            if (t < horizon) evs.push_back({t, 1, j});
    std::sort(evs.begin(), evs.end(), [](const Event& a, const Event& b) {
        return std::tie(a.tick, a.phase, a.index) < std::tie(b.tick, b.phase, b.index);
    });
    return evs;
}

}  // namespace

EngineRunResult run_engine(EngineKind kind, const SpikeTrace& trace, const SynapseGraph& graph,
                           const StdpKernel& kernel, WeightBounds bounds,
                           const EngineRunOptions& opts) {
    if (trace.pre.size() != graph.dims.inputs || trace.post.size() != graph.dims.neurons)
        throw std::out_of_range("trace sources do not match the core geometry");
    trace.validate();

    const uint64_t stimulus_ticks =
        opts.duration_ticks ? opts.duration_ticks : trace.end_tick();
    const std::vector<Event> evs = collect_events(trace, stimulus_ticks);

    StdpEngine engine(kind, graph, kernel, bounds);

    EngineRunResult out;
    const bool sampling = opts.sample_period > 0;
    std::vector<uint32_t> sampled = opts.sample_synapses;
    if (sampling && sampled.empty()) {
        sampled.resize(graph.synapse_count());
        std::iota(sampled.begin(), sampled.end(), 0u);
    }
    const auto record = [&](uint64_t tick) {
        out.trajectory.ticks.push_back(tick);
        auto& row = out.trajectory.values.emplace_back();
        row.reserve(sampled.size());
        for (uint32_t s : sampled) row.push_back(engine.weights()[s]);
    };
    if (sampling) out.trajectory.synapses = sampled;

    size_t cursor = 0;
    uint64_t t = 0;
    while (t < stimulus_ticks) {
        if (!sampling && !engine.timers().any_active() &&
            (cursor >= evs.size() || evs[cursor].tick > t)) {
            // nothing armed and nothing arriving: jump to the next event
            if (cursor >= evs.size()) break;
            t = evs[cursor].tick;
        }
        while (cursor < evs.size() && evs[cursor].tick == t && evs[cursor].phase == 0) {
            engine.on_pre_spike(evs[cursor].index);
            ++cursor;
        }
        while (cursor < evs.size() && evs[cursor].tick == t && evs[cursor].phase == 1) {
            engine.on_post_spike(evs[cursor].index);
            ++cursor;
        }
        engine.end_tick();
        if (sampling && (t + 1) % opts.sample_period == 0) record(t);
        ++t;
    }

    // drain deferred causal updates with silent ticks
    uint64_t drain = 0;
    t = stimulus_ticks;
    while (engine.timers().any_pre_active()) {
        engine.end_tick();
        if (sampling && (t + 1) % opts.sample_period == 0) record(t);
        ++t;
        ++drain;
    }
    const uint64_t total = stimulus_ticks + drain;
    if (sampling && total > 0 && (out.trajectory.ticks.empty() || out.trajectory.ticks.back() != total - 1))
        record(total - 1);

    out.final_weights.assign(engine.weights().begin(), engine.weights().end());
    out.saturation_events = engine.saturation_events();
    out.stimulus_ticks = stimulus_ticks;
    out.drain_ticks = drain;
    return out;
}

// -- trace oracle -------------------------------------------------------

namespace {

double oracle_one_synapse(const std::vector<uint32_t>& pre_train,
                          const std::vector<uint32_t>& post_train, double initial,
                          const StdpKernel& kernel, const WeightBounds& bounds) {
    double w = initial;
    uint64_t saturations = 0;
    size_t a = 0, b = 0;
    int64_t last_pre = -1, last_post = -1;
    while (a < pre_train.size() || b < post_train.size()) {
        const int64_t tp = a < pre_train.size() ? int64_t(pre_train[a])
                                                : std::numeric_limits<int64_t>::max();
        const int64_t tq = b < post_train.size() ? int64_t(post_train[b])
                                                 : std::numeric_limits<int64_t>::max();
        if (tp <= tq) {
            // pre spike: acausal pairing with the latest strictly-earlier post
            if (last_post >= 0) saturate_add(w, kernel.at(last_post - tp), bounds, saturations);
            last_pre = tp;
            ++a;
        } else {
            // post spike: causal pairing with the latest pre at or before it;
            // an equal-tick pre gives dt = 0 and is excluded by the kernel
            if (last_pre >= 0) saturate_add(w, kernel.at(tq - last_pre), bounds, saturations);
            last_post = tq;
            ++b;
        }
    }
    return w;
}

}  // namespace

std::vector<double> trace_oracle_serial(const SpikeTrace& trace, const SynapseGraph& graph,
                                        const StdpKernel& kernel, WeightBounds bounds) {
    if (trace.pre.size() != graph.dims.inputs || trace.post.size() != graph.dims.neurons)
        throw std::out_of_range("trace sources do not match the core geometry");
    trace.validate();
    bounds.validate();
    std::vector<double> out(graph.synapse_count());
    for (uint32_t i = 0; i < graph.dims.inputs; ++i) {
        for (uint64_t s = graph.row_offset[i]; s < graph.row_offset[i + 1]; ++s) {
            out[s] = oracle_one_synapse(trace.pre[i], trace.post[graph.col[s]],
                                        graph.initial_weight[s], kernel, bounds);
        }
    }
    return out;
}

std::vector<double> trace_oracle(const SpikeTrace& trace, const SynapseGraph& graph,
                                 const StdpKernel& kernel, WeightBounds bounds) {
    if (trace.pre.size() != graph.dims.inputs || trace.post.size() != graph.dims.neurons)
        throw std::out_of_range("trace sources do not match the core geometry");
    trace.validate();
    bounds.validate();
    std::vector<double> out(graph.synapse_count());
    const int64_t n = int64_t(graph.synapse_count());
#pragma omp parallel for schedule(static)
    for (int64_t s = 0; s < n; ++s) {
        const uint32_t i = graph.input_of(uint32_t(s));
        out[size_t(s)] = oracle_one_synapse(trace.pre[i], trace.post[graph.col[size_t(s)]],
                                            graph.initial_weight[size_t(s)], kernel, bounds);
    }
    return out;
}

}  // namespace spikeforge
