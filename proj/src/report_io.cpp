#include "spikeforge/report_io.hpp"

#include <charconv>
#include <ostream>
#include <stdexcept>

namespace spikeforge {

std::string fmt_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_final_weights_csv(std::ostream& out, std::span<const SynapseGraph::Pair> pairs,
                             const std::vector<double>* forward,
                             const std::vector<double>* oracle) {
    out << "pre,post";
    if (forward) out << ",weight_forward";
    if (oracle) out << ",weight_oracle";
    out << '\n';
    for (size_t s = 0; s < pairs.size(); ++s) {
        out << pairs[s].pre << ',' << pairs[s].post;
        if (forward) out << ',' << fmt_double((*forward)[s]);
        if (oracle) out << ',' << fmt_double((*oracle)[s]);
        out << '\n';
    }
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj,
                          std::span<const SynapseGraph::Pair> pairs) {
    out << "tick,pre,post,weight\n";
    for (size_t row = 0; row < traj.ticks.size(); ++row) {
        for (size_t k = 0; k < traj.synapses.size(); ++k) {
            const auto& pair = pairs[traj.synapses[k]];
            out << traj.ticks[row] << ',' << pair.pre << ',' << pair.post << ','
                << fmt_double(traj.values[row][k]) << '\n';
        }
    }
}

void write_diff_csv(std::ostream& out, std::span<const SynapseGraph::Pair> pairs,
                    std::span<const double> forward, std::span<const double> oracle) {
    if (pairs.size() != forward.size() || pairs.size() != oracle.size())
        throw std::invalid_argument("diff csv: size mismatch");
    out << "pre,post,w_oracle,w_forward,diff\n";
    for (size_t s = 0; s < pairs.size(); ++s) {
        out << pairs[s].pre << ',' << pairs[s].post << ',' << fmt_double(oracle[s]) << ','
            << fmt_double(forward[s]) << ',' << fmt_double(oracle[s] - forward[s]) << '\n';
    }
}

void write_histogram_csv(std::ostream& out, const DiffStats& stats) {
    out << "bin_low,bin_high,count\n";
    for (const HistogramBin& b : stats.histogram)
        out << b.lo << ',' << b.lo + 1 << ',' << b.count << '\n';
}

void write_memory_curve_csv(std::ostream& out, std::span<const CurveSample> samples) {
    out << "d,crossbar_bits,indexed_bits_mean,indexed_bits_stddev\n";
    for (const CurveSample& s : samples) {
        out << fmt_double(s.density) << ',' << s.crossbar_bits << ','
            << fmt_double(s.indexed_mean) << ',' << fmt_double(s.indexed_stddev) << '\n';
    }
}

}  // namespace spikeforge
