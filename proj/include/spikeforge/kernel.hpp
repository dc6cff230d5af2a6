#pragma once

#include <cstdint>

namespace spikeforge {

enum class KernelShape { ramp, box, exponential };

/// Weight update bounds; every engine update saturates into [lo, hi].
struct WeightBounds {
    double lo = -256.0;
    double hi = 255.0;
    void validate() const;  // lo < hi
};

/// Pairing kernel: weight delta as a function of the spike-time difference
/// dt = t_post - t_pre, in ticks. Positive dt (pre before post) potentiates,
/// negative dt depresses, dt = 0 and anything at or beyond the window edges
/// contributes nothing.
class StdpKernel {
public:
    static StdpKernel ramp(uint32_t t_causal, uint32_t t_acausal, double max_dw);
    static StdpKernel box(uint32_t t_causal, uint32_t t_acausal, double max_dw);
    static StdpKernel exponential(uint32_t t_causal, uint32_t t_acausal, double max_dw,
                                  double tau);

    double at(int64_t dt) const;

    KernelShape shape() const { return shape_; }
    uint32_t t_causal() const { return t_causal_; }
    uint32_t t_acausal() const { return t_acausal_; }
    double max_dw() const { return max_dw_; }
    double tau() const { return tau_; }
    /// Timer length shared by both sides: the longer of the two windows.
    uint32_t window() const { return t_causal_ > t_acausal_ ? t_causal_ : t_acausal_; }

private:
    StdpKernel(KernelShape shape, uint32_t t_causal, uint32_t t_acausal, double max_dw,
               double tau);

    KernelShape shape_;
    uint32_t t_causal_;
    uint32_t t_acausal_;
    double max_dw_;
    double tau_;
};

}  // namespace spikeforge
