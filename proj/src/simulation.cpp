#include "prophet/simulation.hpp"

#include <cstdio>
#include <ostream>

#include "prophet/error.hpp"
#include "text_util.hpp"

namespace prophet {

Policy parse_policy(const std::string& name) {
    if (name == "nopf") return Policy::NoPf;
    if (name == "nofilter") return Policy::NoFilter;
    if (name == "patternconf") return Policy::PatternConf;
    if (name == "prophet") return Policy::Prophet;
    throw Error(ErrorKind::Usage, "unknown policy '" + name + "'");
}

std::string to_string(Policy policy) {
    switch (policy) {
    case Policy::NoPf: return "nopf";
    case Policy::NoFilter: return "nofilter";
    case Policy::PatternConf: return "patternconf";
    case Policy::Prophet: return "prophet";
    }
    return "unknown";
}

namespace detail {

struct SimAssembly {
    std::uint32_t metadata_ways = 0;
    PrefetcherConfig prefetcher;
    TableConfig table;
    HintBuffer hints;
};

}  // namespace detail

namespace {

LlcCache partitioned(const CacheConfig& cache, std::uint32_t metadata_ways) {
    CacheConfig c = cache;
    c.metadata_ways = 0;
    LlcCache llc(c);
    llc.set_partition(metadata_ways);
    return llc;
}

detail::SimAssembly assemble(const SimConfig& config, const HintManifest* manifest) {
    validate(config.cache);
    detail::SimAssembly a;
    a.prefetcher = config.prefetcher;
    a.prefetcher.simplified_mode = false;
    switch (config.policy) {
    case Policy::NoPf:
        a.metadata_ways = 0;
        a.prefetcher.victim_buffer_enabled = false;
        break;
    case Policy::NoFilter:
    case Policy::PatternConf:
        a.metadata_ways = config.cache.metadata_ways;
        a.prefetcher.insertion = config.policy == Policy::NoFilter
                                     ? InsertionMode::NoFilter
                                     : InsertionMode::PatternConfBaseline;
        a.prefetcher.victim_buffer_enabled = false;
        break;
    case Policy::Prophet: {
        if (manifest == nullptr)
            throw Error(ErrorKind::Usage, "policy prophet requires a hint manifest");
        const auto& csr = manifest->csr;
        a.metadata_ways = csr.resizing_from_profile ? csr.metadata_ways : config.cache.metadata_ways;
        if (a.metadata_ways > config.cache.ways)
            throw Error(ErrorKind::Usage, "manifest asks for more metadata ways than the LLC has");
        if (csr.prophet_enabled) {
            a.prefetcher.insertion = InsertionMode::ProphetHints;
            a.prefetcher.replacement = ReplacementMode::ProphetPriorityLru;
            a.hints = HintBuffer(manifest->hints);
        } else {
            // Prophet switched off in the CSR: plain runtime prefetcher.
            a.prefetcher.insertion = InsertionMode::NoFilter;
            a.prefetcher.victim_buffer_enabled = false;
        }
        break;
    }
    }
    a.table = table_config_for(config.cache, a.metadata_ways, a.prefetcher.replacement);
    return a;
}

}  // namespace

Simulator::Simulator(const CacheConfig& cache, detail::SimAssembly a)
    : cache_(partitioned(cache, a.metadata_ways)),
      engine_(a.prefetcher, a.table, std::move(a.hints)) {}

Simulator::Simulator(const SimConfig& config, const HintManifest* manifest)
    : Simulator(config.cache, assemble(config, manifest)) {}

Simulator Simulator::simplified(const CacheConfig& cache) {
    validate(cache);
    detail::SimAssembly a;
    a.metadata_ways = cache.metadata_ways;
    a.prefetcher = simplified_prefetcher_config();
    a.table = simplified_table_config(cache, ReplacementMode::Lru);
    return Simulator(cache, std::move(a));
}

void Simulator::step(const MemoryAccess& access) {
    if (access.kind == AccessKind::L1PrefetchFill) {
        cache_.untracked_fill(access.line_addr);
        engine_.train(access);
        return;
    }

    auto result = cache_.demand_access(access.line_addr);
    if (result.outcome == DemandOutcome::Miss) {
        engine_.record_demand_miss(access.pc);
        if (hook_) hook_(EventKind::DemandMiss, access.pc);
    } else if (result.outcome == DemandOutcome::HitOnPrefetch) {
        engine_.record_useful(*result.issuing_pc);
        ++useful_;
        if (hook_) hook_(EventKind::PrefetchUseful, *result.issuing_pc);
    }

    for (auto target : engine_.on_demand(access)) {
        engine_.record_issue(access.pc, cache_.prefetch_fill(target, access.pc));
        ++issued_;
        if (hook_) hook_(EventKind::PrefetchIssued, access.pc);
    }
    engine_.train(access);
}

void Simulator::run(std::span<const MemoryAccess> trace) {
    for (const auto& a : trace) step(a);
}

double coverage(std::uint64_t baseline_misses, std::uint64_t misses) {
    if (baseline_misses == 0) return 0.0;
    return (static_cast<double>(baseline_misses) - static_cast<double>(misses)) /
           static_cast<double>(baseline_misses);
}

SimReport simulate(std::span<const MemoryAccess> trace, const SimConfig& config,
                   const HintManifest* manifest) {
    SimConfig baseline_config = config;
    baseline_config.policy = Policy::NoPf;
    Simulator baseline(baseline_config);
    baseline.run(trace);

    Simulator sim(config, manifest);
    sim.run(trace);

    SimReport r;
    r.run_id = config.run_id;
    r.policy = to_string(config.policy);
    r.demand_accesses = sim.demand_accesses();
    r.demand_misses = sim.demand_misses();
    r.issued = sim.issued();
    r.useful = sim.useful();
    r.baseline_misses = baseline.demand_misses();
    r.coverage = coverage(r.baseline_misses, r.demand_misses);
    r.accuracy = r.issued == 0 ? 0.0 : static_cast<double>(r.useful) / static_cast<double>(r.issued);
    r.traffic_proxy = r.demand_misses + r.issued - sim.engine().redundant_issues();
    r.metadata_ways = sim.cache().metadata_ways();
    r.seed = config.seed;

    const auto& engine = sim.engine();
    const auto capacity = engine.table().config().entry_capacity();
    auto table_bits = MetadataTable::storage_for(capacity);
    r.storage.table_payload_bits = table_bits.payload_bits;
    if (engine.config().insertion == InsertionMode::ProphetHints) {
        r.storage.replacement_state_bits = table_bits.replacement_bits;
        r.storage.hint_buffer_bits = HintBuffer::storage_bits();
    }
    if (auto* vb = sim.engine().victim_buffer())
        r.storage.victim_buffer_bits = VictimBuffer::storage_bits(vb->capacity());

    for (const auto& [pc, stats] : engine.pc_stats()) r.per_pc.push_back({pc, stats});
    return r;
}

std::string format_fraction(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", value);
    return buf;
}

std::string report_csv_row(const SimReport& r) {
    return r.run_id + ',' + r.policy + ',' + std::to_string(r.demand_accesses) + ',' +
           std::to_string(r.demand_misses) + ',' + std::to_string(r.issued) + ',' +
           std::to_string(r.useful) + ',' + format_fraction(r.coverage) + ',' +
           format_fraction(r.accuracy) + ',' + std::to_string(r.traffic_proxy);
}

void write_report_csv(std::ostream& out, const SimReport& report) {
    out << kReportCsvHeader << '\n' << report_csv_row(report) << '\n';
}

void write_pc_report_csv(std::ostream& out, const SimReport& report) {
    out << kPcReportCsvHeader << '\n';
    for (const auto& row : report.per_pc)
        out << text::hex(row.pc) << ',' << row.stats.issued << ',' << row.stats.useful << ','
            << row.stats.demand_misses << ',' << format_fraction(row.stats.accuracy()) << '\n';
}

}  // namespace prophet
