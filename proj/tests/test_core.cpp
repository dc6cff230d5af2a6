#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>

#include "spikeforge/core.hpp"

using namespace spikeforge;

namespace {

CoreConfig small_config(TableKind kind = TableKind::indexed) {
    CoreConfig cfg;
    cfg.dims = TableDims{4, 4, 9};
    cfg.table_kind = kind;
    cfg.kernel = StdpKernel::ramp(20, 20, 1.0);
    cfg.bounds = WeightBounds{-256.0, 255.0};
    return cfg;
}

ConnectivityMatrix full_matrix(TableDims dims, double w = 0.0) {
    ConnectivityMatrix m(dims);
    for (uint32_t i = 0; i < dims.inputs; ++i)
        for (uint32_t j = 0; j < dims.neurons; ++j) m.connect(i, j, w);
    return m;
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() &&
           (a.empty() || std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
}

}  // namespace

TEST_CASE("core construction") {
    auto cfg = small_config();
    cfg.dims = TableDims{64, 64, 9};
    Core core(cfg, full_matrix(cfg.dims), {EngineKind::forward, EngineKind::oracle});

    CHECK(core.graph().synapse_count() == 4096);
    for (uint32_t i = 0; i < 64; ++i) CHECK(core.engines()[0].timers().pre(i) == 0);
    for (uint32_t j = 0; j < 64; ++j) CHECK(core.engines()[0].timers().post(j) == 0);
    CHECK(bitwise_equal(
        std::vector<double>(core.engines()[0].weights().begin(),
                            core.engines()[0].weights().end()),
        std::vector<double>(core.engines()[1].weights().begin(),
                            core.engines()[1].weights().end())));

    // dimension mismatch is fatal
    CHECK_THROWS_AS(Core(small_config(), full_matrix(TableDims{3, 4, 9}),
                         {EngineKind::forward}),
                    ConfigError);
}

TEST_CASE("crossbar and indexed cores expose identical rows") {
    ConnectivityMatrix m(TableDims{4, 4, 9});
    m.connect(0, 1, 3.0);
    m.connect(2, 0, -2.0);
    m.connect(2, 3, 1.0);
    Core a(small_config(TableKind::crossbar), m, {EngineKind::forward});
    Core b(small_config(TableKind::indexed), m, {EngineKind::forward});
    for (uint32_t i = 0; i < 4; ++i) CHECK(a.table().row(i) == b.table().row(i));
    CHECK(a.memory().crossbar_bits == 4 * 4 * 9);
    CHECK(a.memory().indexed_bits == b.table().memory_bits());
}

TEST_CASE("a density-zero core runs but holds no weights") {
    auto cfg = small_config();
    Core core(cfg, ConnectivityMatrix(cfg.dims), {EngineKind::forward});
    CHECK(core.graph().synapse_count() == 0);
    std::vector<Core> cores;
    cores.push_back(std::move(core));
    SpikeTrace trace(4, 4);
    trace.pre[0] = {1};
    trace.post[2] = {3};
    const auto report = run_system(cores, {trace}, 10);
    CHECK(report.cores[0].engines[0].final_weights.empty());
}

TEST_CASE("single steps follow the canonical order") {
    auto cfg = small_config();
    Core core(cfg, full_matrix(cfg.dims), {EngineKind::forward});

    // tick 0: inject a post spike; timer armed to the window afterwards
    core.step(0, {}, std::vector<uint32_t>{2});
    CHECK(core.engines()[0].timers().post(2) == 19);  // armed, then decremented

    // tick 1: silent
    core.step(1, {}, {});

    // tick 2: input 1 arrives; exactly one acausal update, against neuron 2
    core.step(2, std::vector<uint32_t>{1}, {});
    const auto w = core.engines()[0].weights();
    const int64_t s = core.graph().find(1, 2);
    REQUIRE(s >= 0);
    CHECK(w[size_t(s)] == doctest::Approx(-0.9));  // dt = -2
    for (size_t k = 0; k < w.size(); ++k)
        if (int64_t(k) != s) CHECK(w[k] == 0.0);

    CHECK_THROWS_AS(core.step(2, {}, {}), std::logic_error);  // non-increasing tick
}

TEST_CASE("a tick with no events and no armed timers changes nothing") {
    auto cfg = small_config();
    Core core(cfg, full_matrix(cfg.dims), {EngineKind::forward, EngineKind::oracle});
    const std::vector<double> before(core.engines()[0].weights().begin(),
                                     core.engines()[0].weights().end());
    core.step(0, {}, {});
    core.step(1, {}, {});
    CHECK(bitwise_equal(before, std::vector<double>(core.engines()[0].weights().begin(),
                                                    core.engines()[0].weights().end())));
    CHECK_FALSE(core.any_pre_timer_active());
}

TEST_CASE("routing delivers one event per destination") {
    EventQueue q;
    RoutingTable routing(4);
    routing[3] = {{0, 7}, {1, 2}};
    route(routing, std::vector<uint32_t>{3}, 5, 1, 2, q);
    CHECK(q.pushed() == 2);
    CHECK(q.take(5).empty());
    const auto at6 = q.take(6);
    CHECK(at6 == std::vector<std::pair<uint32_t, uint32_t>>{{0, 7}, {1, 2}});
    CHECK(q.empty());

    // empty routing list: nothing to do
    route(routing, std::vector<uint32_t>{0}, 5, 1, 2, q);
    CHECK(q.empty());

    // dangling core id
    RoutingTable bad(1);
    bad[0] = {{9, 0}};
    CHECK_THROWS_AS(route(bad, std::vector<uint32_t>{0}, 0, 1, 2, q), std::out_of_range);
}

TEST_CASE("fan-out produces one event per destination and duplicates collapse") {
    EventQueue q;
    RoutingTable routing(1);
    routing[0] = {{0, 1}, {0, 2}, {0, 3}, {0, 1}};
    route(routing, std::vector<uint32_t>{0}, 0, 2, 1, q);
    CHECK(q.pushed() == 4);                 // delivered exactly once each
    CHECK(q.take(2).size() == 3);         // same-input duplicates collapse
}

TEST_CASE("loopback routing re-enters as an input event on the next tick") {
    // neuron 3 loops back into input 0; a post spike at t=5 must produce an
    // acausal pairing when input 0's event lands at t=6 (dt = -1)
    auto cfg = small_config();
    RoutingTable loop(4);
    loop[3] = {{0, 0}};
    std::vector<Core> cores;
    cores.emplace_back(cfg, full_matrix(cfg.dims), std::vector<EngineKind>{EngineKind::forward},
                       loop);
    SpikeTrace trace(4, 4);
    trace.post[3] = {5};
    const auto report = run_system(cores, {trace}, 10);
    CHECK(report.delivered_events == 1);
    const int64_t s = cores[0].graph().find(0, 3);
    REQUIRE(s >= 0);
    CHECK(report.cores[0].engines[0].final_weights[size_t(s)] ==
          doctest::Approx(StdpKernel::ramp(20, 20, 1.0).at(-1)));
}

TEST_CASE("the run drains every deferred update") {
    auto cfg = small_config();
    std::vector<Core> cores;
    cores.emplace_back(cfg, full_matrix(cfg.dims),
                       std::vector<EngineKind>{EngineKind::forward, EngineKind::oracle});
    SpikeTrace trace(4, 4);
    trace.pre[0] = {95};   // timer would still be live at t = 100
    trace.post[1] = {98};
    const auto report = run_system(cores, {trace}, 100);
    CHECK(report.stimulus_ticks == 100);
    CHECK(report.drain_ticks == 20);  // window-length silent tail
    CHECK_FALSE(cores[0].any_pre_timer_active());

    // the deferred causal update landed during the drain
    const int64_t s = cores[0].graph().find(0, 1);
    const auto& fwd = report.cores[0].engines[0].final_weights;
    const auto& orc = report.cores[0].engines[1].final_weights;
    CHECK(fwd[size_t(s)] == doctest::Approx(0.85));  // dt = 3
    CHECK(bitwise_equal(fwd, orc));
}

TEST_CASE("duration zero returns the initial weights") {
    auto cfg = small_config();
    std::vector<Core> cores;
    cores.emplace_back(cfg, full_matrix(cfg.dims, 1.25),
                       std::vector<EngineKind>{EngineKind::forward});
    SpikeTrace trace(4, 4);
    trace.pre[0] = {5};
    const auto report = run_system(cores, {trace}, 0);
    CHECK(report.drain_ticks == 0);
    for (double w : report.cores[0].engines[0].final_weights) CHECK(w == 1.25);
}

TEST_CASE("system runs are deterministic") {
    auto cfg = small_config();
    SpikeTrace trace(4, 4);
    trace.pre[0] = {1, 30};
    trace.pre[2] = {8};
    trace.post[1] = {4, 27};
    trace.post[3] = {9};

    const auto once = [&] {
        std::vector<Core> cores;
        cores.emplace_back(cfg, full_matrix(cfg.dims),
                           std::vector<EngineKind>{EngineKind::forward, EngineKind::oracle});
        SystemRunOptions opts;
        opts.sample_period = 7;
        return run_system(cores, {trace}, 40, opts);
    };
    const auto a = once();
    const auto b = once();
    REQUIRE(a.cores[0].engines.size() == 2);
    for (size_t e = 0; e < 2; ++e) {
        CHECK(bitwise_equal(a.cores[0].engines[e].final_weights,
                            b.cores[0].engines[e].final_weights));
        CHECK(a.cores[0].engines[e].trajectory.ticks == b.cores[0].engines[e].trajectory.ticks);
        for (size_t r = 0; r < a.cores[0].engines[e].trajectory.values.size(); ++r)
            CHECK(bitwise_equal(a.cores[0].engines[e].trajectory.values[r],
                                b.cores[0].engines[e].trajectory.values[r]));
    }
}

TEST_CASE("stored weights land in the table, quantized") {
    auto cfg = small_config();
    ConnectivityMatrix m(cfg.dims);
    m.connect(0, 1, 0.0);
    std::vector<Core> cores;
    cores.emplace_back(cfg, m, std::vector<EngineKind>{EngineKind::oracle});
    SpikeTrace trace(4, 4);
    trace.pre[0] = {10};
    trace.post[1] = {15};
    run_system(cores, {trace}, 40);
    cores[0].store_weights(EngineKind::oracle);
    // 0.75 rounds half away from zero to 1
    CHECK(cores[0].table().row(0) == std::vector<RowEntry>{{1, 1.0}});
}

TEST_CASE("two cores exchange spikes through the routing fabric") {
    // core 0 neuron 0 feeds core 1 input 2; only core 0 receives stimulus
    auto cfg = small_config();
    RoutingTable r0(4);
    r0[0] = {{1, 2}};
    std::vector<Core> cores;
    cores.emplace_back(cfg, full_matrix(cfg.dims), std::vector<EngineKind>{EngineKind::forward},
                       r0);
    cores.emplace_back(cfg, full_matrix(cfg.dims),
                       std::vector<EngineKind>{EngineKind::forward});

    SpikeTrace t0(4, 4), t1(4, 4);
    t0.post[0] = {3};   // routed to core 1 input 2 at t = 4
    t1.post[1] = {2};   // core 1 local post spike: acausal partner (dt = -2)
    std::vector<SpikeTrace> stim{t0, t1};
    const auto report = run_system(cores, stim, 10);
    CHECK(report.delivered_events == 1);
    const int64_t s = cores[1].graph().find(2, 1);
    REQUIRE(s >= 0);
    CHECK(report.cores[1].engines[0].final_weights[size_t(s)] == doctest::Approx(-0.9));
}
