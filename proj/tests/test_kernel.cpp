#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "spikeforge/kernel.hpp"
#include "spikeforge/timer_bank.hpp"

using namespace spikeforge;

TEST_CASE("ramp kernel values") {
    const StdpKernel k = StdpKernel::ramp(20, 20, 1.0);
    CHECK(k.at(10) == doctest::Approx(0.5));
    CHECK(k.at(-5) == doctest::Approx(-0.75));
    CHECK(k.at(5) == doctest::Approx(0.75));
    CHECK(k.at(-2) == doctest::Approx(-0.9));
    CHECK(k.at(-7) == doctest::Approx(-0.65));
    CHECK(k.at(0) == 0.0);
    CHECK(k.at(20) == 0.0);
    CHECK(k.at(-20) == 0.0);
    CHECK(k.at(25) == 0.0);
    CHECK(k.at(-25) == 0.0);
    CHECK(k.at(19) == doctest::Approx(0.05));
    CHECK(k.at(-19) == doctest::Approx(-0.05));
}

TEST_CASE("box kernel values") {
    const StdpKernel k = StdpKernel::box(10, 15, 0.5);
    CHECK(k.at(1) == 0.5);
    CHECK(k.at(9) == 0.5);
    CHECK(k.at(10) == 0.0);
    CHECK(k.at(-1) == -0.5);
    CHECK(k.at(-14) == -0.5);
    CHECK(k.at(-15) == 0.0);
    CHECK(k.at(0) == 0.0);
}

TEST_CASE("exponential kernel values") {
    const StdpKernel k = StdpKernel::exponential(20, 20, 2.0, 5.0);
    CHECK(k.at(1) == doctest::Approx(2.0));    // peak at |dt| = 1
    CHECK(k.at(-1) == doctest::Approx(-2.0));
    CHECK(k.at(6) == doctest::Approx(2.0 * std::exp(-1.0)));
    CHECK(k.at(-11) == doctest::Approx(-2.0 * std::exp(-2.0)));
    CHECK(k.at(0) == 0.0);
    CHECK(k.at(20) == 0.0);
    CHECK(k.at(-20) == 0.0);
}

TEST_CASE("asymmetric windows share one timer length") {
    const StdpKernel k = StdpKernel::ramp(10, 20, 1.0);
    CHECK(k.window() == 20);
    CHECK(k.at(9) > 0.0);
    CHECK(k.at(10) == 0.0);  // outside the shorter causal window
    CHECK(k.at(15) == 0.0);
    CHECK(k.at(-15) < 0.0);  // still inside the longer acausal window
}

TEST_CASE("kernel parameter validation") {
    CHECK_THROWS_AS(StdpKernel::ramp(0, 20, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(StdpKernel::ramp(20, 0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(StdpKernel::ramp(20, 20, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(StdpKernel::ramp(20, 20, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(StdpKernel::exponential(20, 20, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS((WeightBounds{1.0, 1.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((WeightBounds{2.0, -2.0}.validate()), std::invalid_argument);
}

TEST_CASE("timer decrement and expiry collection") {
    TimerBank bank(3, 2, 5);
    std::vector<uint32_t> expired;

    bank.tick(expired);
    CHECK(expired.empty());
    CHECK_FALSE(bank.any_active());

    bank.arm_pre(0);
    bank.arm_pre(1);
    bank.arm_post(1);
    CHECK(bank.any_active());

    // force pre 0 down to 1 while pre 1 stays higher
    for (int k = 0; k < 4; ++k) {
        expired.clear();
        bank.tick(expired);
        CHECK(expired.empty());
        bank.arm_pre(1);
    }
    CHECK(bank.pre(0) == 1);
    expired.clear();
    bank.tick(expired);
    CHECK(expired == std::vector<uint32_t>{0});
    CHECK(bank.pre(0) == 0);
    CHECK(bank.post(1) == 0);
    CHECK(bank.any_pre_active());  // pre 1 still counting

    // zero timers stay zero
    expired.clear();
    bank.tick(expired);
    CHECK(bank.pre(0) == 0);
    CHECK(expired.empty());
}

TEST_CASE("a timer armed at t expires after exactly window ticks") {
    const uint32_t window = 7;
    TimerBank bank(1, 1, window);
    bank.arm_pre(0);
    std::vector<uint32_t> expired;
    uint32_t ticks = 0;
    while (bank.any_pre_active()) {
        expired.clear();
        bank.tick(expired);
        ++ticks;
    }
    CHECK(ticks == window);
    CHECK(expired == std::vector<uint32_t>{0});
}
