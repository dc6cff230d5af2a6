#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "spikeforge/errors.hpp"
#include "spikeforge/rng.hpp"
#include "spikeforge/stimulus.hpp"

using namespace spikeforge;

TEST_CASE("splitmix64 matches the reference sequence") {
    // frozen from an independent build of the reference implementation
    SplitMix64 a(0);
    CHECK(a.next() == 0xc632e25248389155ull);
    CHECK(a.next() == 0xa6efdfd3a7faae45ull);
    CHECK(a.next() == 0x744aced07b41f6f3ull);
    CHECK(a.next() == 0x8ffa0fd101464309ull);

    SplitMix64 b(0x123456789ABCDEFull);
    CHECK(b.next() == 0xb8d6a2d61d6431b0ull);
    CHECK(b.next() == 0xfad14b5757d42a47ull);

    SplitMix64 s0(42, 0);
    CHECK(s0.next() == 0x5a9a54ad0f357444ull);
    CHECK(s0.next() == 0x300be0a409c941d6ull);
    SplitMix64 s7(42, 7);
    CHECK(s7.next() == 0x3d95cc1eee07edbcull);
    CHECK(s7.next() == 0x29dc96d2459b2fb3ull);

    SplitMix64 u(1);
    CHECK(u.uniform01() == 0.8755689527584504);
}

TEST_CASE("degenerate trains") {
    StimulusConfig cfg;
    cfg.duration_ticks = 1000;
    cfg.seed = 9;

    SUBCASE("zero rate is silent") {
        cfg.rate_hz = 0.0;
        CHECK(poisson_train(cfg, 0).empty());
    }
    SUBCASE("certain firing with a long refractory spikes once, at tick 0") {
        cfg.rate_hz = 1000.0;  // p = 1 at 1 ms ticks
        cfg.refractory_ticks = 2000;
        const auto train = poisson_train(cfg, 3);
        CHECK(train == std::vector<uint32_t>{0});
    }
    SUBCASE("certain firing with refractory 4 is strictly periodic") {
        cfg.rate_hz = 1000.0;
        cfg.refractory_ticks = 4;
        const auto train = poisson_train(cfg, 3);
        REQUIRE(train.size() == 200);
        for (size_t k = 0; k < train.size(); ++k) CHECK(train[k] == 5 * k);
    }
    SUBCASE("over-unity probability is rejected") {
        cfg.rate_hz = 1001.0;
        CHECK_THROWS_AS(poisson_train(cfg, 0), ConfigError);
    }
}

TEST_CASE("refractory gap is respected") {
    StimulusConfig cfg;
    cfg.rate_hz = 200.0;
    cfg.refractory_ticks = 7;
    cfg.duration_ticks = 20000;
    cfg.seed = 4;
    for (uint64_t src = 0; src < 4; ++src) {
        const auto train = poisson_train(cfg, src);
        REQUIRE(train.size() > 100);
        for (size_t k = 1; k < train.size(); ++k)
            REQUIRE(train[k] - train[k - 1] >= cfg.refractory_ticks + 1);
    }
}

TEST_CASE("trains are reproducible per (seed, source) and differ across sources") {
    StimulusConfig cfg;
    cfg.rate_hz = 50.0;
    cfg.duration_ticks = 5000;
    cfg.seed = 1234;
    CHECK(poisson_train(cfg, 5) == poisson_train(cfg, 5));
    CHECK(poisson_train(cfg, 5) != poisson_train(cfg, 6));
    StimulusConfig other = cfg;
    other.seed = 1235;
    CHECK(poisson_train(cfg, 5) != poisson_train(other, 5));
}

TEST_CASE("effective rate closed forms") {
    CHECK(effective_rate_hz(0.01, 0) == doctest::Approx(10.0));
    CHECK(effective_rate_hz(0.01, 20) == doctest::Approx(1000.0 / 120.0));
    CHECK(effective_rate_hz(0.01, 5) == doctest::Approx(1000.0 / 105.0));
    CHECK(effective_rate_hz(1.0, 4) == doctest::Approx(200.0));
    CHECK_THROWS_AS(effective_rate_hz(0.0, 0), ConfigError);
}

TEST_CASE("long-run empirical rate approaches the renewal mean") {
    StimulusConfig cfg;
    cfg.rate_hz = 10.0;
    cfg.refractory_ticks = 5;
    cfg.duration_ticks = 200000;
    cfg.seed = 21;
    const double p = cfg.spike_probability();
    const auto train = poisson_train(cfg, 0);
    const double rate_hz = 1000.0 * double(train.size()) / double(cfg.duration_ticks);
    const double expected = effective_rate_hz(p, cfg.refractory_ticks);
    // renewal CLT: var(interval) = (1-p)/p^2, mean = t_ref + 1/p
    const double mean = cfg.refractory_ticks + 1.0 / p;
    const double se_hz =
        1000.0 * std::sqrt((1.0 - p) / (p * p) / (double(cfg.duration_ticks) * mean * mean * mean));
    CHECK(std::abs(rate_hz - expected) < 3.0 * se_hz);
}

TEST_CASE("trace building is parallel-safe and layout-stable") {
    StimulusConfig cfg;
    cfg.rate_hz = 40.0;
    cfg.refractory_ticks = 3;
    cfg.duration_ticks = 3000;
    cfg.seed = 77;
    const SpikeTrace a = build_trace(cfg, 5, 9);
    const SpikeTrace b = build_trace_serial(cfg, 5, 9);
    REQUIRE(a.pre.size() == 5);
    REQUIRE(a.post.size() == 9);
    CHECK(a.pre == b.pre);
    CHECK(a.post == b.post);
    // neuron j draws from substream inputs + j
    CHECK(a.post[0] == poisson_train(cfg, 5));
    CHECK(a.pre[4] == poisson_train(cfg, 4));
}
