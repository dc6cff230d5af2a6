#include "spikeforge/kernel.hpp"

#include <cmath>
#include <stdexcept>

namespace spikeforge {

void WeightBounds::validate() const {
    if (!(lo < hi)) throw std::invalid_argument("WeightBounds: lo must be < hi");
}

StdpKernel::StdpKernel(KernelShape shape, uint32_t t_causal, uint32_t t_acausal,
                       double max_dw, double tau)
    : shape_(shape), t_causal_(t_causal), t_acausal_(t_acausal), max_dw_(max_dw), tau_(tau) {
    if (t_causal_ < 1 || t_acausal_ < 1)
        throw std::invalid_argument("StdpKernel: window lengths must be >= 1 tick");
    if (!(max_dw_ > 0)) throw std::invalid_argument("StdpKernel: max_dw must be > 0");
    if (shape_ == KernelShape::exponential && !(tau_ > 0))
        throw std::invalid_argument("StdpKernel: tau must be > 0");
}

StdpKernel StdpKernel::ramp(uint32_t t_causal, uint32_t t_acausal, double max_dw) {
    return StdpKernel(KernelShape::ramp, t_causal, t_acausal, max_dw, 0.0);
}

StdpKernel StdpKernel::box(uint32_t t_causal, uint32_t t_acausal, double max_dw) {
    return StdpKernel(KernelShape::box, t_causal, t_acausal, max_dw, 0.0);
}

StdpKernel StdpKernel::exponential(uint32_t t_causal, uint32_t t_acausal, double max_dw,
                                   double tau) {
    return StdpKernel(KernelShape::exponential, t_causal, t_acausal, max_dw, tau);
}

double StdpKernel::at(int64_t dt) const {
    if (dt > 0 && dt < int64_t(t_causal_)) {
        switch (shape_) {
            case KernelShape::ramp:
                return max_dw_ * double(int64_t(t_causal_) - dt) / double(t_causal_);
            case KernelShape::box:
                return max_dw_;
            case KernelShape::exponential:
                return max_dw_ * std::exp(-double(dt - 1) / tau_);
        }
    }
    if (dt < 0 && -dt < int64_t(t_acausal_)) {
        switch (shape_) {
            case KernelShape::ramp:
                return -max_dw_ * double(int64_t(t_acausal_) + dt) / double(t_acausal_);
            case KernelShape::box:
                return -max_dw_;
            case KernelShape::exponential:
                return -max_dw_ * std::exp(-double(-dt - 1) / tau_);
        }
    }
    return 0.0;
}

}  // namespace spikeforge
