// Command-line front end: simulate, sweep-refractory, memory, encode, decode.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spikeforge/analysis.hpp"
#include "spikeforge/experiment.hpp"
#include "spikeforge/report_io.hpp"

namespace {

using namespace spikeforge;

std::optional<uint64_t> env_seed_override() {
    const char* env = std::getenv("SPIKEFORGE_SEED");
    if (!env || !*env) return std::nullopt;
    try {
        return std::stoull(env);
    } catch (const std::exception&) {
        throw ConfigError(std::string("SPIKEFORGE_SEED is not a number: ") + env);
    }
}

ExperimentConfig load_config(const std::string& path) {
    ExperimentConfig cfg = parse_config(path);
    if (const auto seed = env_seed_override()) cfg.stimulus.seed = *seed;
    return cfg;
}

void print_summary(const SimulationOutcome& outcome) {
    std::cout << "synapses: " << outcome.synapse_pairs.size() << '\n'
              << "density: " << fmt_double(outcome.memory.density) << '\n'
              << "memory_bits crossbar: " << outcome.memory.crossbar_bits
              << " indexed: " << outcome.memory.indexed_bits << '\n'
              << "stimulus_ticks: " << outcome.stimulus_ticks
              << " drain_ticks: " << outcome.drain_ticks << '\n';
    if (outcome.forward_weights)
        std::cout << "forward saturation_events: " << outcome.forward_saturations << '\n';
    if (outcome.oracle_weights)
        std::cout << "oracle saturation_events: " << outcome.oracle_saturations << '\n';
    if (outcome.oracle_weights && outcome.trace_oracle_weights)
        std::cout << "oracle_equivalent: " << (outcome.oracle_equivalent ? "true" : "false")
                  << '\n';
    if (outcome.diff) {
        std::cout << "exact: " << (outcome.exact ? "true" : "false") << '\n'
                  << "all_nonneg: " << (outcome.diff->all_nonneg ? "true" : "false") << '\n'
                  << "max_diff: " << fmt_double(outcome.diff->max_diff) << '\n'
                  << "frac_gt_4: " << fmt_double(outcome.diff->frac_gt_4) << '\n';
    }
}

int cmd_simulate(const std::string& config_path) {
    const ExperimentConfig cfg = load_config(config_path);
    const SimulationOutcome outcome = run_experiment(cfg);
    for (const std::string& path : write_outputs(outcome, cfg))
        std::cout << "wrote " << path << '\n';
    print_summary(outcome);
    const CheckOutcome checks = evaluate_checks(outcome, cfg);
    for (const std::string& f : checks.failures) std::cout << "check failed: " << f << '\n';
    return checks.ok ? 0 : 1;
}

int cmd_sweep(const std::string& config_path, const std::vector<uint32_t>& t_refs,
              const std::string& out_path) {
    if (t_refs.empty()) return 0;
    const ExperimentConfig cfg = load_config(config_path);
    const std::vector<SweepRow> rows = sweep_refractory(cfg, t_refs);

    std::ostringstream csv;
    csv << "t_ref,max_diff,frac_gt_4,exact\n";
    for (const SweepRow& r : rows) {
        csv << r.t_ref << ',' << fmt_double(r.max_abs_diff) << ',' << fmt_double(r.frac_gt_4)
            << ',' << (r.exact ? "true" : "false") << '\n';
    }
    if (out_path.empty()) {
        std::cout << csv.str();
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw IoError("cannot write " + out_path);
        out << csv.str();
        std::cout << "wrote " << out_path << '\n';
    }
    return 0;
}

int cmd_memory(uint32_t inputs, uint32_t neurons, const std::vector<uint32_t>& weight_bits,
               const std::vector<double>& densities, uint32_t trials, uint64_t seed,
               double tolerance, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);

    std::vector<double> grid = densities;
    if (grid.empty()) {
        for (int k = 0; k <= 50; ++k) grid.push_back(double(k) / 50.0);
    }

    std::ofstream dc_out(fs::path(out_dir) / "dc.csv", std::ios::binary);
    if (!dc_out) throw IoError("cannot write dc.csv");
    dc_out << "w,d_c\n";
    std::cout << "w     d_c\n";
    for (uint32_t w : weight_bits) {
        const TableDims dims{inputs, neurons, w};
        const auto samples = memory_curve(dims, grid, trials, seed);
        const fs::path curve_path = fs::path(out_dir) / ("curve_w" + std::to_string(w) + ".csv");
        std::ofstream curve(curve_path, std::ios::binary);
        if (!curve) throw IoError("cannot write " + curve_path.string());
        write_memory_curve_csv(curve, samples);

        const auto dc = critical_density(dims, tolerance, trials, seed);
        const std::string dc_str = dc ? fmt_double(*dc) : "none";
        dc_out << w << ',' << dc_str << '\n';
        std::cout << w << (w < 10 ? "     " : "    ") << dc_str << '\n';
    }
    std::cout << "wrote " << (fs::path(out_dir) / "dc.csv").string() << '\n';
    return 0;
}

int cmd_encode(const std::string& edges_path, const std::string& out_path,
               std::optional<uint32_t> inputs, std::optional<uint32_t> neurons,
               uint32_t weight_bits) {
    if (inputs.has_value() != neurons.has_value())
        throw ConfigError("encode: give both --inputs and --neurons, or neither");
    std::ifstream in(edges_path);
    if (!in) throw IoError("cannot open " + edges_path);
    std::optional<TableDims> dims;
    if (inputs && neurons) dims = TableDims{*inputs, *neurons, weight_bits};
    const ConnectivityMatrix m = load_edge_list(in, dims, weight_bits);

    EncodeStats stats;
    const IndexedTable table = encode_indexed(m, &stats);
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw IoError("cannot write " + out_path);
    save_indexed(out, table);
    std::cout << "wrote " << out_path << " (" << table.memory_bits() << " bits, "
              << m.connection_count() << " connections)\n";
    if (stats.clamped)
        std::cout << "warning: " << stats.clamped << " weight(s) clamped to the storable range\n";
    return 0;
}

int cmd_decode(const std::string& table_path, const std::string& out_path) {
    std::ifstream in(table_path, std::ios::binary);
    if (!in) throw IoError("cannot open " + table_path);
    const IndexedTable table = load_indexed(in);
    const ConnectivityMatrix m = decode_indexed(table);
    if (out_path.empty()) {
        save_edge_list(std::cout, m);
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw IoError("cannot write " + out_path);
        save_edge_list(out, m);
        std::cout << "wrote " << out_path << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Neuromorphic-core STDP simulator and memory-model analyzer"};
    app.require_subcommand(1);

    std::string config_path;
    auto* simulate = app.add_subcommand("simulate", "Run the engines described by a config file");
    simulate->add_option("config", config_path, "experiment config file")->required();

    std::string sweep_config, sweep_out;
    std::vector<uint32_t> t_refs;
    auto* sweep = app.add_subcommand("sweep-refractory",
                                     "Re-run a config across refractory periods");
    sweep->add_option("config", sweep_config, "experiment config file")->required();
    sweep->add_option("--t-ref", t_refs, "refractory periods, in ticks")
        ->required()
        ->delimiter(',');
    sweep->add_option("-o,--output", sweep_out, "summary CSV path (default: stdout)");

    uint32_t mem_inputs = 256, mem_neurons = 256, mem_trials = 32;
    uint64_t mem_seed = 7;
    double mem_tolerance = 1e-3;
    std::vector<uint32_t> mem_bits{9};
    std::vector<double> mem_densities;
    std::string mem_out = "memory_out";
    auto* memory = app.add_subcommand("memory", "Memory curves and critical densities");
    memory->add_option("--inputs", mem_inputs, "core inputs")->capture_default_str();
    memory->add_option("--neurons", mem_neurons, "core neurons")->capture_default_str();
    memory->add_option("--weight-bits", mem_bits, "weight widths to analyze")
        ->delimiter(',')
        ->capture_default_str();
    memory->add_option("--densities", mem_densities,
                       "density grid (default: 0,0.02,...,1)")
        ->delimiter(',');
    memory->add_option("--trials", mem_trials, "matrices per density")->capture_default_str();
    memory->add_option("--seed", mem_seed, "sampling seed")->capture_default_str();
    memory->add_option("--tolerance", mem_tolerance, "bisection tolerance")
        ->capture_default_str();
    memory->add_option("-o,--output", mem_out, "output directory")->capture_default_str();

    std::string enc_edges, enc_out = "table.bin";
    std::optional<uint32_t> enc_inputs, enc_neurons;
    uint32_t enc_bits = 9;
    auto* encode = app.add_subcommand("encode", "Compress an edge list into a table dump");
    encode->add_option("edges", enc_edges, "edge list CSV")->required();
    encode->add_option("-o,--output", enc_out, "table path")->capture_default_str();
    encode->add_option("--inputs", enc_inputs, "rows (default: inferred)");
    encode->add_option("--neurons", enc_neurons, "columns (default: inferred)");
    encode->add_option("--weight-bits", enc_bits, "stored weight width")->capture_default_str();

    std::string dec_table, dec_out;
    auto* decode = app.add_subcommand("decode", "Expand a table dump back into an edge list");
    decode->add_option("table", dec_table, "table dump path")->required();
    decode->add_option("-o,--output", dec_out, "edge list path (default: stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) return cmd_simulate(config_path);
        if (sweep->parsed()) return cmd_sweep(sweep_config, t_refs, sweep_out);
        if (memory->parsed())
            return cmd_memory(mem_inputs, mem_neurons, mem_bits, mem_densities, mem_trials,
                              mem_seed, mem_tolerance, mem_out);
        if (encode->parsed())
            return cmd_encode(enc_edges, enc_out, enc_inputs, enc_neurons, enc_bits);
        if (decode->parsed()) return cmd_decode(dec_table, dec_out);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return 2;
    }
    return 0;
}
