#include "spikeforge/stimulus.hpp"

#include "spikeforge/errors.hpp"
#include "spikeforge/rng.hpp"

namespace spikeforge {

double StimulusConfig::spike_probability() const {
    if (!(tick_ms > 0)) throw ConfigError("stimulus: tick_ms must be > 0");
    const double p = rate_hz * tick_ms / 1000.0;
    if (!(p >= 0.0) || p > 1.0)
        throw ConfigError("stimulus: rate_hz * tick implies spike probability outside [0, 1]");
    return p;
}

std::vector<uint32_t> poisson_train(const StimulusConfig& config, uint64_t source_index) {
    const double p = config.spike_probability();
    SplitMix64 rng(config.seed, source_index);
    std::vector<uint32_t> out;
    uint64_t next_eligible = 0;
    for (uint64_t t = 0; t < config.duration_ticks; ++t) {
        const bool fire = rng.uniform01() < p;  // one draw per tick, refractory or not
        if (fire && t >= next_eligible) {
            out.push_back(uint32_t(t));
            next_eligible = t + 1 + config.refractory_ticks;
        }
    }
    return out;
}

double effective_rate_hz(double spike_probability, uint32_t refractory_ticks, double tick_ms) {
    if (!(spike_probability > 0.0) || spike_probability > 1.0)
        throw ConfigError("effective_rate: spike probability must be in (0, 1]");
    const double mean_interval = double(refractory_ticks) + 1.0 / spike_probability;
    return 1000.0 / (mean_interval * tick_ms);
}

SpikeTrace build_trace_serial(const StimulusConfig& config, uint32_t inputs, uint32_t neurons) {
    SpikeTrace trace(inputs, neurons);
    for (uint32_t i = 0; i < inputs; ++i) trace.pre[i] = poisson_train(config, i);
    for (uint32_t j = 0; j < neurons; ++j)
        trace.post[j] = poisson_train(config, uint64_t(inputs) + j);
    return trace;
}

SpikeTrace build_trace(const StimulusConfig& config, uint32_t inputs, uint32_t neurons) {
    config.spike_probability();  // validate before fanning out
    SpikeTrace trace(inputs, neurons);
    const int64_t total = int64_t(inputs) + neurons;
#pragma omp parallel for schedule(dynamic)
    for (int64_t k = 0; k < total; ++k) {
        auto& train = k < int64_t(inputs) ? trace.pre[size_t(k)] : trace.post[size_t(k - inputs)];
        train = poisson_train(config, uint64_t(k));
    }
    return trace;
}

}  // namespace spikeforge
