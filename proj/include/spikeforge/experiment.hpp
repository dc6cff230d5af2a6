#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spikeforge/analysis.hpp"
#include "spikeforge/config.hpp"
#include "spikeforge/core.hpp"

namespace spikeforge {

/// Everything produced by one configured run: the engine outcomes on
/// identical topology and stimulus, plus the derived comparisons.
struct SimulationOutcome {
    ExperimentReport report;  // outcome of the hosted engines (single core)
    std::vector<SynapseGraph::Pair> synapse_pairs;
    SpikeTrace trace;

    std::optional<std::vector<double>> forward_weights;
    std::optional<std::vector<double>> oracle_weights;
    std::optional<std::vector<double>> trace_oracle_weights;
    std::optional<Trajectory> forward_trajectory;
    std::optional<Trajectory> oracle_trajectory;
    uint64_t forward_saturations = 0;
    uint64_t oracle_saturations = 0;

    std::optional<DiffStats> diff;  // oracle minus forward
    bool exact = false;             // forward == oracle, bit for bit
    bool expected_exact = false;    // refractory covers the STDP window
    bool oracle_equivalent = true;  // event oracle == offline oracle
    MemoryReport memory;
    uint64_t stimulus_ticks = 0;
    uint64_t drain_ticks = 0;
};

SimulationOutcome run_experiment(const ExperimentConfig& config);

struct CheckOutcome {
    bool ok = true;
    std::vector<std::string> failures;
};

/// Internal-consistency verdicts plus any thresholds from [checks]:
/// oracle/offline equality when both ran, non-negative differences when no
/// update saturated, exactness whenever the refractory period covers the
/// window, and the optional frac(e > 4) ceiling.
CheckOutcome evaluate_checks(const SimulationOutcome& outcome, const ExperimentConfig& config);

/// Write the CSV/binary reports requested by [outputs]. Returns the paths.
std::vector<std::string> write_outputs(const SimulationOutcome& outcome,
                                       const ExperimentConfig& config);

struct SweepRow {
    uint32_t t_ref = 0;
    double max_abs_diff = 0.0;
    double frac_gt_4 = 0.0;
    bool exact = false;
};

/// Re-run the experiment for each refractory period; rows come back in
/// input order. Runs fan out with OpenMP; each run is serial inside.
std::vector<SweepRow> sweep_refractory(const ExperimentConfig& base,
                                       std::span<const uint32_t> t_refs);

}  // namespace spikeforge
