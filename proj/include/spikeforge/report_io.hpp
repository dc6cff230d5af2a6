#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include "spikeforge/analysis.hpp"
#include "spikeforge/engine.hpp"

namespace spikeforge {

/// Shortest round-trip decimal form of a double.
std::string fmt_double(double v);

void write_final_weights_csv(std::ostream& out, std::span<const SynapseGraph::Pair> pairs,
                             const std::vector<double>* forward,
                             const std::vector<double>* oracle);

/// Rows tick,pre,post,weight for every sampled synapse.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj,
                          std::span<const SynapseGraph::Pair> pairs);

void write_diff_csv(std::ostream& out, std::span<const SynapseGraph::Pair> pairs,
                    std::span<const double> forward, std::span<const double> oracle);

void write_histogram_csv(std::ostream& out, const DiffStats& stats);

void write_memory_curve_csv(std::ostream& out, std::span<const CurveSample> samples);

}  // namespace spikeforge
