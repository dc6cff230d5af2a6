#include "spikeforge/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <type_traits>

#include "spikeforge/errors.hpp"
#include "spikeforge/rng.hpp"

namespace spikeforge {

namespace {

struct Entry {
    std::string value;
    size_t line = 0;
    bool used = false;
};

using Section = std::map<std::string, Entry>;

std::string trim(std::string s) {
    const auto issp = [](unsigned char c) { return std::isspace(c) != 0; };
    while (!s.empty() && issp(s.back())) s.pop_back();
    size_t b = 0;
    while (b < s.size() && issp(s[b])) ++b;
    return s.substr(b);
}

[[noreturn]] void fail(const std::string& name, size_t line, const std::string& what) {
    throw ConfigError(name + ":" + std::to_string(line) + ": " + what);
}

struct Parsed {
    std::string name;
    std::map<std::string, Section> sections;
    std::map<std::string, size_t> section_line;

    const Entry* find(const std::string& sec, const std::string& key) {
        auto s = sections.find(sec);
        if (s == sections.end()) return nullptr;
        auto k = s->second.find(key);
        if (k == s->second.end()) return nullptr;
        k->second.used = true;
        return &k->second;
    }

    std::string require(const std::string& sec, const std::string& key) {
        const Entry* e = find(sec, key);
        if (!e) {
            auto s = sections.find(sec);
            const size_t line = s == sections.end() ? 0 : section_line[sec];
            fail(name, line, "missing required key '" + key + "' in section [" + sec + "]");
        }
        return e->value;
    }

    void reject_unused() const {
        for (const auto& [sec, entries] : sections) {
            for (const auto& [key, e] : entries) {
                if (!e.used)
                    fail(name, e.line, "unknown key '" + key + "' in section [" + sec + "]");
            }
        }
    }
};

Parsed read_sections(std::istream& in, const std::string& name,
                     const std::set<std::string>& known_sections) {
    Parsed p;
    p.name = name;
    std::string line;
    std::string current;
    size_t lineno = 0;
    bool have_section = false;
    while (std::getline(in, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (t.front() == '[') {
            if (t.back() != ']') fail(name, lineno, "malformed section header");
            current = trim(t.substr(1, t.size() - 2));
            if (!known_sections.count(current))
                fail(name, lineno, "unknown section [" + current + "]");
            if (p.sections.count(current))
                fail(name, lineno, "duplicate section [" + current + "]");
            p.sections[current];
            p.section_line[current] = lineno;
            have_section = true;
            continue;
        }
        const size_t eq = t.find('=');
        if (eq == std::string::npos) fail(name, lineno, "expected 'key = value'");
        if (!have_section) fail(name, lineno, "key outside of any [section]");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty() || value.empty()) fail(name, lineno, "expected 'key = value'");
        if (p.sections[current].count(key))
            fail(name, lineno, "duplicate key '" + key + "'");
        p.sections[current][key] = Entry{value, lineno, false};
    }
    return p;
}

template <typename T>
T parse_number(const Parsed& p, const Entry& e, const std::string& what) {
    if (std::is_unsigned_v<T> && e.value.find('-') != std::string::npos)
        fail(p.name, e.line, what + " must be non-negative, got '" + e.value + "'");
    std::istringstream is(e.value);
    T v{};
    if (!(is >> v) || !(is >> std::ws).eof())
        fail(p.name, e.line, "cannot parse " + what + " from '" + e.value + "'");
    return v;
}

bool parse_bool(const Parsed& p, const Entry& e) {
    if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
    if (e.value == "false" || e.value == "0" || e.value == "no") return false;
    fail(p.name, e.line, "expected a boolean, got '" + e.value + "'");
}

}  // namespace

ExperimentConfig parse_config(std::istream& in, const std::string& name) {
    Parsed p = read_sections(
        in, name, {"core", "topology", "stimulus", "engines", "outputs", "checks"});

    ExperimentConfig cfg;

    // [core]
    auto req = [&](const char* sec, const char* key) -> const Entry& {
        const Entry* e = p.find(sec, key);
        if (!e) p.require(sec, key);  // throws with line context
        return *e;
    };
    auto req_u32 = [&](const char* sec, const char* key) {
        return parse_number<uint32_t>(p, req(sec, key), key);
    };
    auto req_u64 = [&](const char* sec, const char* key) {
        return parse_number<uint64_t>(p, req(sec, key), key);
    };
    auto req_f64 = [&](const char* sec, const char* key) {
        return parse_number<double>(p, req(sec, key), key);
    };
    if (!p.sections.count("core")) fail(name, 0, "missing section [core]");
    cfg.core.dims.inputs = req_u32("core", "inputs");
    cfg.core.dims.neurons = req_u32("core", "neurons");
    cfg.core.dims.weight_bits = req_u32("core", "weight_bits");
    try {
        cfg.core.dims.validate();
    } catch (const std::exception& ex) {
        fail(name, p.section_line["core"], ex.what());
    }

    {
        const std::string table = p.require("core", "table");
        if (table == "crossbar")
            cfg.core.table_kind = TableKind::crossbar;
        else if (table == "indexed")
            cfg.core.table_kind = TableKind::indexed;
        else
            fail(name, p.find("core", "table")->line,
                 "table must be 'crossbar' or 'indexed', got '" + table + "'");
    }

    const std::string kernel_name = p.require("core", "kernel");
    const uint32_t t_causal = req_u32("core", "t_causal");
    const uint32_t t_acausal = req_u32("core", "t_acausal");
    const double max_dw = req_f64("core", "max_dw");
    try {
        if (kernel_name == "ramp") {
            cfg.core.kernel = StdpKernel::ramp(t_causal, t_acausal, max_dw);
        } else if (kernel_name == "box") {
            cfg.core.kernel = StdpKernel::box(t_causal, t_acausal, max_dw);
        } else if (kernel_name == "exponential") {
            cfg.core.kernel = StdpKernel::exponential(t_causal, t_acausal, max_dw,
                                                      req_f64("core", "tau"));
        } else {
            fail(name, p.find("core", "kernel")->line,
                 "kernel must be ramp, box, or exponential, got '" + kernel_name + "'");
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& ex) {
        fail(name, p.find("core", "kernel")->line, ex.what());
    }
    if (kernel_name != "exponential" && p.find("core", "tau"))
        fail(name, p.find("core", "tau")->line, "tau applies only to the exponential kernel");

    cfg.core.bounds.lo = req_f64("core", "w_min");
    cfg.core.bounds.hi = req_f64("core", "w_max");
    try {
        cfg.core.bounds.validate();
    } catch (const std::exception& ex) {
        fail(name, p.find("core", "w_min")->line, ex.what());
    }
    cfg.core.tick_ms = req_f64("core", "tick_ms");
    if (!(cfg.core.tick_ms > 0))
        fail(name, p.find("core", "tick_ms")->line, "tick_ms must be > 0");
    if (p.find("core", "routing_delay"))
        cfg.core.routing_delay = parse_number<uint32_t>(p, *p.find("core", "routing_delay"),
                                                        "routing_delay");
    if (cfg.core.routing_delay < 1)
        fail(name, p.find("core", "routing_delay")->line, "routing_delay must be >= 1");

    // [topology]
    if (!p.sections.count("topology")) fail(name, 0, "missing section [topology]");
    if (const Entry* e = p.find("topology", "edge_list")) {
        cfg.topology.edge_list = e->value;
        if (p.find("topology", "density") || p.find("topology", "seed"))
            fail(name, e->line, "edge_list excludes density/seed");
    } else {
        const Entry* d = p.find("topology", "density");
        if (!d) p.require("topology", "density");
        cfg.topology.density = parse_number<double>(p, *d, "density");
        if (!(cfg.topology.density >= 0.0 && cfg.topology.density <= 1.0))
            fail(name, d->line, "density must be in [0, 1]");
        const Entry* s = p.find("topology", "seed");
        if (!s) p.require("topology", "seed");
        cfg.topology.seed = parse_number<uint64_t>(p, *s, "seed");
    }
    if (const Entry* e = p.find("topology", "initial_weight"))
        cfg.topology.initial_weight = parse_number<double>(p, *e, "initial_weight");

    // [stimulus]
    if (!p.sections.count("stimulus")) fail(name, 0, "missing section [stimulus]");
    cfg.stimulus.rate_hz = req_f64("stimulus", "rate_hz");
    cfg.stimulus.refractory_ticks = req_u32("stimulus", "t_ref");
    cfg.stimulus.duration_ticks = req_u64("stimulus", "duration_ticks");
    cfg.stimulus.seed = req_u64("stimulus", "seed");
    cfg.stimulus.tick_ms = cfg.core.tick_ms;
    cfg.core.refractory_ticks = cfg.stimulus.refractory_ticks;
    try {
        cfg.stimulus.spike_probability();
    } catch (const std::exception& ex) {
        fail(name, p.find("stimulus", "rate_hz")->line, ex.what());
    }

    // [engines]
    if (!p.sections.count("engines")) fail(name, 0, "missing section [engines]");
    cfg.run_forward = false;
    cfg.run_oracle = false;
    cfg.run_trace_oracle = false;
    if (const Entry* e = p.find("engines", "forward")) cfg.run_forward = parse_bool(p, *e);
    if (const Entry* e = p.find("engines", "oracle")) cfg.run_oracle = parse_bool(p, *e);
    if (const Entry* e = p.find("engines", "trace_oracle"))
        cfg.run_trace_oracle = parse_bool(p, *e);
    if (!cfg.run_forward && !cfg.run_oracle && !cfg.run_trace_oracle)
        fail(name, p.section_line["engines"], "at least one engine must be enabled");

    // [outputs]
    if (p.sections.count("outputs")) {
        if (const Entry* e = p.find("outputs", "directory")) cfg.outputs.directory = e->value;
        if (const Entry* e = p.find("outputs", "final_weights"))
            cfg.outputs.final_weights = parse_bool(p, *e);
        if (const Entry* e = p.find("outputs", "diff")) cfg.outputs.diff = parse_bool(p, *e);
        if (const Entry* e = p.find("outputs", "histogram"))
            cfg.outputs.histogram = parse_bool(p, *e);
        if (const Entry* e = p.find("outputs", "trajectory"))
            cfg.outputs.trajectory = parse_bool(p, *e);
        if (const Entry* e = p.find("outputs", "spike_trace"))
            cfg.outputs.spike_trace = parse_bool(p, *e);
        if (const Entry* e = p.find("outputs", "table_dump"))
            cfg.outputs.table_dump = parse_bool(p, *e);
        if (const Entry* e = p.find("outputs", "trajectory_sample_period"))
            cfg.outputs.trajectory_sample_period =
                parse_number<uint32_t>(p, *e, "trajectory_sample_period");
        if (const Entry* e = p.find("outputs", "trajectory_pairs")) {
            std::istringstream is(e->value);
            std::string tok;
            while (std::getline(is, tok, ',')) {
                tok = trim(tok);
                const size_t colon = tok.find(':');
                if (colon == std::string::npos)
                    fail(name, e->line, "trajectory_pairs entries look like 'pre:post'");
                try {
                    cfg.outputs.trajectory_pairs.emplace_back(
                        uint32_t(std::stoul(tok.substr(0, colon))),
                        uint32_t(std::stoul(tok.substr(colon + 1))));
                } catch (const std::exception&) {
                    fail(name, e->line, "cannot parse trajectory pair '" + tok + "'");
                }
            }
        }
        if (cfg.outputs.trajectory && cfg.outputs.trajectory_sample_period == 0)
            fail(name, p.section_line["outputs"],
                 "trajectory output needs trajectory_sample_period >= 1");
    }

    // [checks]
    if (p.sections.count("checks")) {
        if (const Entry* e = p.find("checks", "max_frac_gt_4"))
            cfg.checks.max_frac_gt_4 = parse_number<double>(p, *e, "max_frac_gt_4");
    }

    p.reject_unused();
    return cfg;
}

ExperimentConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    return parse_config(in, path);
}

ConnectivityMatrix build_topology(const ExperimentConfig& config) {
    if (config.topology.edge_list) {
        std::ifstream in(*config.topology.edge_list);
        if (!in) throw IoError("cannot open edge list: " + *config.topology.edge_list);
        return load_edge_list(in, config.core.dims);
    }
    ConnectivityMatrix m(config.core.dims);
    for (uint32_t i = 0; i < config.core.dims.inputs; ++i) {
        SplitMix64 rng(config.topology.seed, i);
        for (uint32_t j = 0; j < config.core.dims.neurons; ++j) {
            if (rng.uniform01() < config.topology.density)
                m.connect(i, j, config.topology.initial_weight);
        }
    }
    return m;
}

}  // namespace spikeforge
