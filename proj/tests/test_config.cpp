#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>
#include <string>

#include "spikeforge/config.hpp"
#include "spikeforge/errors.hpp"

using namespace spikeforge;

namespace {

const char* kMinimal = R"(
[core]
inputs = 8
neurons = 4
weight_bits = 9
table = indexed
kernel = ramp
t_causal = 20
t_acausal = 10
max_dw = 1.0
w_min = -256
w_max = 255
tick_ms = 1.0

[topology]
density = 0.5
seed = 3

[stimulus]
rate_hz = 10
t_ref = 5
duration_ticks = 1000
seed = 1

[engines]
forward = true
oracle = true
)";

ExperimentConfig parse_str(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in, "test.cfg");
}

std::string with_line(const std::string& base, const std::string& section,
                      const std::string& line) {
    const size_t at = base.find("[" + section + "]");
    REQUIRE(at != std::string::npos);
    std::string out = base;
    const size_t eol = out.find('\n', at);
    out.insert(eol + 1, line + "\n");
    return out;
}

}  // namespace

TEST_CASE("a complete config parses to the expected values") {
    const ExperimentConfig cfg = parse_str(kMinimal);
    CHECK(cfg.core.dims == TableDims{8, 4, 9});
    CHECK(cfg.core.table_kind == TableKind::indexed);
    CHECK(cfg.core.kernel->shape() == KernelShape::ramp);
    CHECK(cfg.core.kernel->t_causal() == 20);
    CHECK(cfg.core.kernel->t_acausal() == 10);
    CHECK(cfg.core.kernel->window() == 20);
    CHECK(cfg.core.bounds.lo == -256.0);
    CHECK(cfg.core.bounds.hi == 255.0);
    CHECK(cfg.topology.density == 0.5);
    CHECK(cfg.topology.seed == 3);
    CHECK(cfg.stimulus.rate_hz == 10.0);
    CHECK(cfg.stimulus.refractory_ticks == 5);
    CHECK(cfg.core.refractory_ticks == 5);  // mirrored for reporting
    CHECK(cfg.stimulus.duration_ticks == 1000);
    CHECK(cfg.run_forward);
    CHECK(cfg.run_oracle);
    CHECK_FALSE(cfg.run_trace_oracle);
    CHECK(cfg.outputs.directory == "out");
}

TEST_CASE("the bundled reference config matches its documented parameters") {
    const ExperimentConfig cfg =
        parse_config(std::string(SPIKEFORGE_CONFIG_DIR) + "/paper_64x64.cfg");
    CHECK(cfg.core.dims == TableDims{64, 64, 9});
    CHECK(cfg.core.table_kind == TableKind::indexed);
    CHECK(cfg.core.kernel->shape() == KernelShape::ramp);
    CHECK(cfg.core.kernel->t_causal() == 20);
    CHECK(cfg.core.kernel->t_acausal() == 20);
    CHECK(cfg.core.kernel->max_dw() == 1.0);
    CHECK(cfg.core.tick_ms == 1.0);
    CHECK(cfg.stimulus.rate_hz == 10.0);
    CHECK(cfg.stimulus.refractory_ticks == 5);
    CHECK(cfg.stimulus.duration_ticks == 60000);
    CHECK(cfg.stimulus.seed == 1);
    CHECK(cfg.topology.density == 1.0);
    CHECK(cfg.run_forward);
    CHECK(cfg.run_oracle);
}

TEST_CASE("strict parsing") {
    SUBCASE("unknown key, with its line in the message") {
        const std::string text = with_line(kMinimal, "core", "frobnicate = 1");
        try {
            parse_str(text);
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            const std::string msg = e.what();
            CHECK(msg.find("frobnicate") != std::string::npos);
            CHECK(msg.find("test.cfg:") != std::string::npos);
        }
    }
    SUBCASE("unknown section") {
        CHECK_THROWS_AS(parse_str(kMinimal + std::string("[wat]\nx = 1\n")), ConfigError);
    }
    SUBCASE("missing required key is named") {
        std::string text = kMinimal;
        const size_t at = text.find("max_dw = 1.0\n");
        text.erase(at, std::string("max_dw = 1.0\n").size());
        try {
            parse_str(text);
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("max_dw") != std::string::npos);
        }
    }
    SUBCASE("unparsable number") {
        std::string text = kMinimal;
        const size_t at = text.find("seed = 3");
        text.replace(at, 8, "seed = x");
        CHECK_THROWS_AS(parse_str(text), ConfigError);
    }
    SUBCASE("negative value for an unsigned key") {
        std::string text = kMinimal;
        const size_t at = text.find("t_ref = 5");
        text.replace(at, 9, "t_ref = -5");
        CHECK_THROWS_AS(parse_str(text), ConfigError);
    }
    SUBCASE("duplicate keys are rejected") {
        CHECK_THROWS_AS(parse_str(with_line(kMinimal, "core", "inputs = 9")), ConfigError);
    }
    SUBCASE("tau is only for the exponential kernel") {
        CHECK_THROWS_AS(parse_str(with_line(kMinimal, "core", "tau = 5")), ConfigError);
    }
    SUBCASE("over-unity spike probability") {
        std::string text = kMinimal;
        const size_t at = text.find("rate_hz = 10");
        text.replace(at, 12, "rate_hz = 1200");
        CHECK_THROWS_AS(parse_str(text), ConfigError);
    }
    SUBCASE("density out of range") {
        std::string text = kMinimal;
        const size_t at = text.find("density = 0.5");
        text.replace(at, 13, "density = 1.5");
        CHECK_THROWS_AS(parse_str(text), ConfigError);
    }
    SUBCASE("at least one engine") {
        std::string text = kMinimal;
        const size_t at = text.find("forward = true");
        text.replace(at, 14, "forward = false");
        const size_t at2 = text.find("oracle = true");
        text.replace(at2, 13, "oracle = false");
        CHECK_THROWS_AS(parse_str(text), ConfigError);
    }
    SUBCASE("edge_list excludes density") {
        CHECK_THROWS_AS(parse_str(with_line(kMinimal, "topology", "edge_list = foo.csv")),
                        ConfigError);
    }
    SUBCASE("trajectory output needs a sample period") {
        CHECK_THROWS_AS(parse_str(kMinimal + std::string("[outputs]\ntrajectory = true\n")),
                        ConfigError);
    }
    SUBCASE("key outside any section") {
        CHECK_THROWS_AS(parse_str("inputs = 4\n" + std::string(kMinimal)), ConfigError);
    }
}

TEST_CASE("full density builds every connection; zero builds none") {
    ExperimentConfig cfg = parse_str(kMinimal);
    cfg.topology.density = 1.0;
    CHECK(build_topology(cfg).connection_count() == 32);
    cfg.topology.density = 0.0;
    CHECK(build_topology(cfg).connection_count() == 0);
    cfg.topology.density = 1.0;
    cfg.topology.initial_weight = 2.5;
    CHECK(build_topology(cfg).weight(0, 0) == 2.5);
}

TEST_CASE("topology generation is seed-deterministic") {
    ExperimentConfig cfg = parse_str(kMinimal);
    const ConnectivityMatrix a = build_topology(cfg);
    const ConnectivityMatrix b = build_topology(cfg);
    CHECK(a == b);
    cfg.topology.seed += 1;
    CHECK_FALSE(build_topology(cfg) == a);
}

TEST_CASE("comments and blank lines are ignored") {
    const ExperimentConfig cfg = parse_str(std::string("# leading comment\n") + kMinimal +
                                           "\n[checks]\nmax_frac_gt_4 = 0.25 # inline\n");
    REQUIRE(cfg.checks.max_frac_gt_4.has_value());
    CHECK(*cfg.checks.max_frac_gt_4 == 0.25);
}
