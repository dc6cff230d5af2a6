#pragma once

#include <cstdint>
#include <vector>

#include "spikeforge/trace.hpp"

namespace spikeforge {

/// Bernoulli-per-tick approximation of a Poisson source with an absolute
/// refractory period. A spike at tick t suppresses ticks t+1 .. t+refractory.
struct StimulusConfig {
    double rate_hz = 0.0;
    uint32_t refractory_ticks = 0;
    uint64_t duration_ticks = 0;
    uint64_t seed = 0;
    double tick_ms = 1.0;

    /// Per-tick spike probability rate_hz * tick_ms / 1000. Throws
    /// ConfigError when it falls outside [0, 1].
    double spike_probability() const;
};

/// Deterministic train for one source. Sources draw from independent
/// splitmix64 substreams keyed by (seed, source_index), one draw per tick,
/// so a train depends only on the seed and its own index.
std::vector<uint32_t> poisson_train(const StimulusConfig& config, uint64_t source_index);

/// Mean firing rate of the generator: 1 / (refractory + 1/p) ticks^-1,
/// converted to Hz.
double effective_rate_hz(double spike_probability, uint32_t refractory_ticks,
                         double tick_ms = 1.0);

/// Trains for every input (source index i) and neuron (source index
/// inputs + j). Sources are independent, so the OpenMP entry point matches
/// the serial one exactly.
SpikeTrace build_trace(const StimulusConfig& config, uint32_t inputs, uint32_t neurons);
SpikeTrace build_trace_serial(const StimulusConfig& config, uint32_t inputs, uint32_t neurons);

}  // namespace spikeforge
