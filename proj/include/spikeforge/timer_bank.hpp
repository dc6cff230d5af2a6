#pragma once

#include <cstdint>
#include <vector>

namespace spikeforge {

/// Countdown timers, one per input line and one per post-synaptic neuron.
///
/// A timer holds values in [0, window]. Arming sets it to `window`; each
/// tick decrements nonzero timers by one. A value t > 0 means the owner
/// spiked (window - t) ticks ago; 0 means nothing within the window.
class TimerBank {
public:
    TimerBank(uint32_t inputs, uint32_t neurons, uint32_t window)
        : window_(window), pre_(inputs, 0), post_(neurons, 0) {}

    uint32_t window() const { return window_; }
    uint32_t pre(uint32_t input) const { return pre_[input]; }
    uint32_t post(uint32_t neuron) const { return post_[neuron]; }
    uint32_t pre_count() const { return uint32_t(pre_.size()); }
    uint32_t post_count() const { return uint32_t(post_.size()); }

    void arm_pre(uint32_t input) {
        if (pre_[input] == 0) ++active_;
        pre_[input] = window_;
    }
    void arm_post(uint32_t neuron) {
        if (post_[neuron] == 0) ++active_;
        post_[neuron] = window_;
    }

    bool any_active() const { return active_ != 0; }
    bool any_pre_active() const {
        for (uint32_t t : pre_)
            if (t) return true;
        return false;
    }

    /// Decrement every nonzero timer. Appends to `expired_pre` the input
    /// indices whose timer went 1 -> 0 this tick, in ascending order.
    void tick(std::vector<uint32_t>& expired_pre) {
        for (uint32_t i = 0; i < pre_.size(); ++i) {
            if (pre_[i] && --pre_[i] == 0) {
                expired_pre.push_back(i);
                --active_;
            }
        }
        for (uint32_t j = 0; j < post_.size(); ++j) {
            if (post_[j] && --post_[j] == 0) --active_;
        }
    }

private:
    uint32_t window_;
    uint64_t active_ = 0;
    std::vector<uint32_t> pre_;
    std::vector<uint32_t> post_;
};

}  // namespace spikeforge
