#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "spikeforge/core.hpp"
#include "spikeforge/stimulus.hpp"

namespace spikeforge {

struct TopologySpec {
    std::optional<std::string> edge_list;  // path; excludes density/seed
    double density = 1.0;
    uint64_t seed = 0;
    double initial_weight = 0.0;
};

struct OutputSpec {
    std::string directory = "out";
    bool final_weights = true;
    bool diff = true;
    bool histogram = false;
    bool trajectory = false;
    bool spike_trace = false;
    bool table_dump = false;
    uint32_t trajectory_sample_period = 0;
    std::vector<std::pair<uint32_t, uint32_t>> trajectory_pairs;  // empty: all synapses
};

struct CheckSpec {
    std::optional<double> max_frac_gt_4;
};

/// One simulation run: geometry, kernel, topology, stimulus, engine
/// selection, and report options.
struct ExperimentConfig {
    CoreConfig core;
    TopologySpec topology;
    StimulusConfig stimulus;
    bool run_forward = true;
    bool run_oracle = true;
    bool run_trace_oracle = false;
    OutputSpec outputs;
    CheckSpec checks;
};

/// Strict `key = value` file with `[section]` headers and `#` comments.
/// Unknown sections or keys, missing required keys, and out-of-range values
/// are all fatal, with the offending line in the message.
ExperimentConfig parse_config(const std::string& path);
ExperimentConfig parse_config(std::istream& in, const std::string& name);

/// Builds the connection matrix described by [topology]: either the edge
/// list file, or Bernoulli(density) cells drawn from per-row substreams
/// (seed, row) with every present weight set to initial_weight.
ConnectivityMatrix build_topology(const ExperimentConfig& config);

}  // namespace spikeforge
