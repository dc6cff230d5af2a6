#pragma once

#include <cstdint>

namespace spikeforge {

/// splitmix64 output mixer.
inline uint64_t splitmix64_mix(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D4ECB17E2D1D9Dull;
    return z ^ (z >> 31);
}

/// splitmix64 generator. Chosen because it is a few lines in any language,
/// which keeps seeded runs reproducible across independent implementations.
class SplitMix64 {
public:
    static constexpr uint64_t kGamma = 0x9E3779B97F4A7C15ull;

    explicit SplitMix64(uint64_t seed) : state_(seed) {}

    /// Decorrelated substream `stream` of a master seed. Substream k starts
    /// from splitmix64_mix(seed ^ (kGamma * (k + 1))).
    SplitMix64(uint64_t seed, uint64_t stream)
        : state_(splitmix64_mix(seed ^ (kGamma * (stream + 1)))) {}

    uint64_t next() {
        state_ += kGamma;
        return splitmix64_mix(state_);
    }

    /// Uniform double in [0, 1) from the high 53 bits.
    double uniform01() { return double(next() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform01() < p; }

private:
    uint64_t state_;
};

}  // namespace spikeforge
