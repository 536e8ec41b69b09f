#include "prophet/config.hpp"

#include <fstream>
#include <functional>
#include <istream>
#include <map>

#include "prophet/error.hpp"
#include "text_util.hpp"

namespace prophet {

namespace {

Error bad_value(const std::string& key, const std::string& value) {
    return Error(ErrorKind::Parse, "config: bad value '" + value + "' for " + key);
}

template <typename T>
T as_unsigned(const std::string& key, const std::string& value) {
    auto v = text::parse_u64(value);
    if (!v) throw bad_value(key, value);
    return static_cast<T>(*v);
}

double as_double(const std::string& key, const std::string& value) {
    auto v = text::parse_double(value);
    if (!v) throw bad_value(key, value);
    return *v;
}

bool as_bool(const std::string& key, const std::string& value) {
    auto v = text::parse_bool(value);
    if (!v) throw bad_value(key, value);
    return *v;
}

}  // namespace

void RunConfig::set_seed(std::uint64_t seed) {
    trace.seed = seed;
    sim.seed = seed;
    profile.seed = seed;
}

void RunConfig::set(const std::string& key, const std::string& value) {
    using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;
    static const std::map<std::string, Setter> setters = {
        {"seed", [](RunConfig& c, auto& k, auto& v) { c.set_seed(as_unsigned<std::uint64_t>(k, v)); }},

        {"cache.total_size", [](RunConfig& c, auto& k, auto& v) { c.sim.cache.total_size = as_unsigned<std::uint64_t>(k, v); }},
        {"cache.ways", [](RunConfig& c, auto& k, auto& v) { c.sim.cache.ways = as_unsigned<std::uint32_t>(k, v); }},
        {"cache.metadata_ways", [](RunConfig& c, auto& k, auto& v) { c.sim.cache.metadata_ways = as_unsigned<std::uint32_t>(k, v); }},

        {"pf.degree", [](RunConfig& c, auto& k, auto& v) { c.sim.prefetcher.degree = as_unsigned<std::uint32_t>(k, v); }},
        {"pf.replacement", [](RunConfig& c, auto&, auto& v) { c.sim.prefetcher.replacement = parse_replacement_mode(v); }},
        {"pf.victim_buffer", [](RunConfig& c, auto& k, auto& v) { c.sim.prefetcher.victim_buffer_enabled = as_bool(k, v); }},
        {"pf.vb_entries", [](RunConfig& c, auto& k, auto& v) { c.sim.prefetcher.victim_buffer.entries = as_unsigned<std::uint64_t>(k, v); }},
        {"pf.vb_candidates", [](RunConfig& c, auto& k, auto& v) { c.sim.prefetcher.victim_buffer.candidates_per_entry = as_unsigned<std::uint32_t>(k, v); }},
        {"pf.training_scope", [](RunConfig& c, auto&, auto& v) { c.sim.prefetcher.scope = parse_training_scope(v); }},
        {"pf.train_on_l1_fills", [](RunConfig& c, auto& k, auto& v) { c.sim.prefetcher.train_on_l1_fills = as_bool(k, v); }},

        {"analysis.el_acc", [](RunConfig& c, auto& k, auto& v) { c.analysis.el_acc = as_double(k, v); }},
        {"analysis.n", [](RunConfig& c, auto& k, auto& v) { c.analysis.n = as_unsigned<unsigned>(k, v); }},
        {"analysis.llc_sets", [](RunConfig& c, auto& k, auto& v) { c.llc_sets_override_ = as_unsigned<std::uint64_t>(k, v); }},
        {"analysis.max_table_bytes", [](RunConfig& c, auto& k, auto& v) { c.analysis.max_table_bytes = as_unsigned<std::uint64_t>(k, v); }},
        {"analysis.top_k", [](RunConfig& c, auto& k, auto& v) { c.analysis.top_k = as_unsigned<std::size_t>(k, v); }},

        {"learn.cap_L", [](RunConfig& c, auto& k, auto& v) { c.cap_L = as_unsigned<std::uint64_t>(k, v); }},

        {"trace.pattern", [](RunConfig& c, auto&, auto& v) { c.trace.pattern = parse_trace_pattern(v); }},
        {"trace.unique_addrs", [](RunConfig& c, auto& k, auto& v) { c.trace.unique_addrs = as_unsigned<std::uint64_t>(k, v); }},
        {"trace.repetitions", [](RunConfig& c, auto& k, auto& v) { c.trace.repetitions = as_unsigned<std::uint64_t>(k, v); }},
        {"trace.noise_ratio", [](RunConfig& c, auto& k, auto& v) { c.trace.noise_ratio = as_double(k, v); }},
        {"trace.fanout", [](RunConfig& c, auto&, auto& v) { c.trace.target_fanout_dist = parse_fanout_distribution(v); }},
        {"trace.seed", [](RunConfig& c, auto& k, auto& v) { c.trace.seed = as_unsigned<std::uint64_t>(k, v); }},
        {"trace.stride_lines", [](RunConfig& c, auto& k, auto& v) {
             auto s = text::parse_i64(v);
             if (!s) throw bad_value(k, v);
             c.trace.stride_lines = *s;
         }},
        {"trace.l1_stride_prefetch", [](RunConfig& c, auto& k, auto& v) { c.trace.l1_stride_prefetch = as_bool(k, v); }},

        {"profile.sample_period", [](RunConfig& c, auto& k, auto& v) { c.profile.sample_period = as_unsigned<std::uint64_t>(k, v); }},
        {"profile.sampling", [](RunConfig& c, auto& k, auto& v) {
             if (v == "every_kth")
                 c.profile.sampling = SamplingMode::EveryKth;
             else if (v == "random")
                 c.profile.sampling = SamplingMode::Random;
             else
                 throw bad_value(k, v);
         }},

        {"sim.policy", [](RunConfig& c, auto&, auto& v) { c.sim.policy = parse_policy(v); }},
        {"sim.run_id", [](RunConfig& c, auto&, auto& v) { c.sim.run_id = v; }},
    };
    auto it = setters.find(key);
    if (it == setters.end()) throw Error(ErrorKind::Usage, "config: unknown key '" + key + "'");
    it->second(*this, key, value);
}

AnalysisParams RunConfig::effective_analysis() const {
    AnalysisParams p = analysis;
    p.llc_sets = llc_sets_override_.value_or(sim.cache.sets());
    return p;
}

ProfileOptions RunConfig::effective_profile() const {
    ProfileOptions p = profile;
    p.cache = sim.cache;
    return p;
}

RunConfig read_run_config(std::istream& in) {
    RunConfig c;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto body = text::trim(line);
        if (body.empty() || body.front() == '#') continue;
        auto kv = text::key_value(body);
        if (!kv) throw Error(ErrorKind::Parse, "config: line " + std::to_string(lineno) + ": expected key=value");
        c.set(std::string(kv->first), std::string(kv->second));
    }
    return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
    try {
        return read_run_config(in);
    } catch (const Error& e) {
        throw Error(e.kind(), path.string() + ": " + e.what());
    }
}

}  // namespace prophet
