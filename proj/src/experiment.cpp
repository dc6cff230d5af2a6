#include "spikeforge/experiment.hpp"

#include <algorithm>
#include <cstring>
#include <exception>
#include <filesystem>
#include <fstream>

#include "spikeforge/report_io.hpp"

namespace spikeforge {

namespace {

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() &&
           (a.empty() || std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
}

std::vector<uint32_t> resolve_pairs(const SynapseGraph& graph,
                                    const std::vector<std::pair<uint32_t, uint32_t>>& pairs) {
    std::vector<uint32_t> ids;
    ids.reserve(pairs.size());
    for (const auto& [pre, post] : pairs) {
        if (pre >= graph.dims.inputs || post >= graph.dims.neurons)
            throw ConfigError("trajectory pair (" + std::to_string(pre) + ":" +
                              std::to_string(post) + ") is out of range");
        const int64_t s = graph.find(pre, post);
        if (s < 0)
            throw ConfigError("trajectory pair (" + std::to_string(pre) + ":" +
                              std::to_string(post) + ") is not a connection");
        ids.push_back(uint32_t(s));
    }
    return ids;
}

}  // namespace

SimulationOutcome run_experiment(const ExperimentConfig& config) {
    ConnectivityMatrix matrix = build_topology(config);
    const SynapseGraph graph = SynapseGraph::from_matrix(matrix);

    SimulationOutcome out;
    out.synapse_pairs.reserve(graph.synapse_count());
    for (uint32_t s = 0; s < graph.synapse_count(); ++s)
        out.synapse_pairs.push_back(graph.pair_of(s));
    out.memory = memory_report(matrix);
    out.trace = build_trace(config.stimulus, config.core.dims.inputs, config.core.dims.neurons);
    out.stimulus_ticks = config.stimulus.duration_ticks;
    out.expected_exact =
        config.stimulus.refractory_ticks >= config.core.kernel->window();

    std::vector<EngineKind> hosted;
    if (config.run_forward) hosted.push_back(EngineKind::forward);
    if (config.run_oracle) hosted.push_back(EngineKind::oracle);

    if (!hosted.empty()) {
        std::vector<Core> cores;
        cores.emplace_back(config.core, std::move(matrix), hosted);

        SystemRunOptions opts;
        if (config.outputs.trajectory) {
            opts.sample_period = config.outputs.trajectory_sample_period;
            opts.sample_synapses = resolve_pairs(graph, config.outputs.trajectory_pairs);
        }
        out.report = run_system(cores, {out.trace}, config.stimulus.duration_ticks, opts);
        out.drain_ticks = out.report.drain_ticks;

        for (const EngineOutcome& e : out.report.cores[0].engines) {
            if (e.kind == EngineKind::forward) {
                out.forward_weights = e.final_weights;
                out.forward_saturations = e.saturation_events;
                if (config.outputs.trajectory) out.forward_trajectory = e.trajectory;
            } else {
                out.oracle_weights = e.final_weights;
                out.oracle_saturations = e.saturation_events;
                if (config.outputs.trajectory) out.oracle_trajectory = e.trajectory;
            }
        }
    }

    if (config.run_trace_oracle)
        out.trace_oracle_weights =
            trace_oracle(out.trace, graph, *config.core.kernel, config.core.bounds);

    if (out.forward_weights && out.oracle_weights) {
        out.exact = bitwise_equal(*out.forward_weights, *out.oracle_weights);
        out.diff = diff_stats(*out.forward_weights, *out.oracle_weights);
    }
    if (out.oracle_weights && out.trace_oracle_weights)
        out.oracle_equivalent = bitwise_equal(*out.oracle_weights, *out.trace_oracle_weights);

    return out;
}

CheckOutcome evaluate_checks(const SimulationOutcome& outcome, const ExperimentConfig& config) {
    CheckOutcome result;
    const auto flag = [&](const std::string& msg) {
        result.ok = false;
        result.failures.push_back(msg);
    };

    if (outcome.oracle_weights && outcome.trace_oracle_weights && !outcome.oracle_equivalent)
        flag("event-driven oracle and offline oracle disagree");

    if (outcome.diff) {
        if (outcome.forward_saturations == 0 && outcome.oracle_saturations == 0 &&
            !outcome.diff->all_nonneg)
            flag("negative oracle-minus-forward difference without any saturation event");
        if (outcome.expected_exact && !outcome.exact)
            flag("refractory period covers the window but the engines disagree");
        if (config.checks.max_frac_gt_4 &&
            outcome.diff->frac_gt_4 > *config.checks.max_frac_gt_4)
            flag("frac(e>4) = " + fmt_double(outcome.diff->frac_gt_4) + " exceeds " +
                 fmt_double(*config.checks.max_frac_gt_4));
    }
    return result;
}

std::vector<std::string> write_outputs(const SimulationOutcome& outcome,
                                       const ExperimentConfig& config) {
    namespace fs = std::filesystem;
    const fs::path dir(config.outputs.directory);
    fs::create_directories(dir);
    std::vector<std::string> written;

    const auto open = [&](const std::string& file) {
        std::ofstream out(dir / file, std::ios::binary);
        if (!out) throw IoError("cannot write " + (dir / file).string());
        written.push_back((dir / file).string());
        return out;
    };

    if (config.outputs.final_weights) {
        const std::vector<double>* fw =
            outcome.forward_weights ? &*outcome.forward_weights : nullptr;
        const std::vector<double>* ow = outcome.oracle_weights ? &*outcome.oracle_weights
                                        : outcome.trace_oracle_weights
                                            ? &*outcome.trace_oracle_weights
                                            : nullptr;
        auto out = open("final_weights.csv");
        write_final_weights_csv(out, outcome.synapse_pairs, fw, ow);
    }
    if (config.outputs.trajectory && outcome.forward_trajectory) {
        auto out = open("trajectory_forward.csv");
        write_trajectory_csv(out, *outcome.forward_trajectory, outcome.synapse_pairs);
    }
    if (config.outputs.trajectory && outcome.oracle_trajectory) {
        auto out = open("trajectory_oracle.csv");
        write_trajectory_csv(out, *outcome.oracle_trajectory, outcome.synapse_pairs);
    }
    if (config.outputs.diff && outcome.diff) {
        auto out = open("diff.csv");
        write_diff_csv(out, outcome.synapse_pairs, *outcome.forward_weights,
                       *outcome.oracle_weights);
    }
    if (config.outputs.histogram && outcome.diff) {
        auto out = open("histogram.csv");
        write_histogram_csv(out, *outcome.diff);
    }
    if (config.outputs.spike_trace) {
        auto out = open("spike_trace.csv");
        save_spike_trace(out, outcome.trace);
    }
    if (config.outputs.table_dump) {
        // dump the compressed layout holding the lead engine's final weights
        ConnectivityMatrix m = build_topology(config);
        const std::vector<double>* lead = outcome.forward_weights  ? &*outcome.forward_weights
                                          : outcome.oracle_weights ? &*outcome.oracle_weights
                                          : outcome.trace_oracle_weights
                                              ? &*outcome.trace_oracle_weights
                                              : nullptr;
        if (lead) {
            for (uint32_t s = 0; s < outcome.synapse_pairs.size(); ++s)
                m.set_weight(outcome.synapse_pairs[s].pre, outcome.synapse_pairs[s].post,
                             (*lead)[s]);
        }
        const IndexedTable table = encode_indexed(m);
        auto out = open("table.bin");
        save_indexed(out, table);
    }
    return written;
}

std::vector<SweepRow> sweep_refractory(const ExperimentConfig& base,
                                       std::span<const uint32_t> t_refs) {
    std::vector<SweepRow> rows(t_refs.size());
    const int64_t n = int64_t(t_refs.size());
    std::exception_ptr first_error;
#pragma omp parallel for schedule(dynamic)
    for (int64_t k = 0; k < n; ++k) {
        try {
            ExperimentConfig cfg = base;
            cfg.stimulus.refractory_ticks = t_refs[size_t(k)];
            cfg.core.refractory_ticks = t_refs[size_t(k)];
            cfg.run_forward = true;
            cfg.run_oracle = true;
            cfg.outputs.trajectory = false;  // sweep reports summaries only

            const SimulationOutcome outcome = run_experiment(cfg);
            SweepRow row;
            row.t_ref = t_refs[size_t(k)];
            row.exact = outcome.exact;
            if (outcome.diff) {
                row.max_abs_diff =
                    std::max({outcome.diff->max_diff, -outcome.diff->min_diff, 0.0});
                row.frac_gt_4 = outcome.diff->frac_gt_4;
            }
            rows[size_t(k)] = row;
        } catch (...) {
            // throwing out of a parallel region would terminate; hand the
            // first failure back to the caller instead
#pragma omp critical
            if (!first_error) first_error = std::current_exception();
        }
    }
    if (first_error) std::rethrow_exception(first_error);
    return rows;
}

}  // namespace spikeforge
