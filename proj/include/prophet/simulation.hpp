#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "prophet/cache.hpp"
#include "prophet/hints.hpp"
#include "prophet/prefetch_engine.hpp"
#include "prophet/trace.hpp"

namespace prophet {

enum class Policy { NoPf, NoFilter, PatternConf, Prophet };

Policy parse_policy(const std::string& name);
std::string to_string(Policy policy);

inline PrefetcherConfig default_sim_prefetcher() {
    PrefetcherConfig c;
    c.victim_buffer_enabled = true;
    return c;
}

struct SimConfig {
    CacheConfig cache{2u << 20, 16, kLineBytes, 8};
    Policy policy = Policy::NoFilter;
    // Degree and training scope apply to every prefetching policy. The
    // insertion mode follows from the policy, `replacement` applies to the
    // baselines only (Prophet uses priority replacement) and the victim
    // buffer is a Prophet feature.
    PrefetcherConfig prefetcher = default_sim_prefetcher();
    std::string run_id = "run";
    std::uint64_t seed = 1;
};

namespace detail {
struct SimAssembly;
}

enum class EventKind { PrefetchIssued, PrefetchUseful, DemandMiss };
using EventHook = std::function<void(EventKind, std::uint64_t pc)>;

/// One functional simulation: LLC data partition plus the temporal prefetcher.
/// Per access: demand lookup, usefulness attribution, prefetch issue, training.
class Simulator {
public:
    /// Prophet requires a manifest; other policies ignore it.
    Simulator(const SimConfig& config, const HintManifest* manifest = nullptr);

    /// Profiling run: simplified prefetcher with the fixed 1 MB table.
    static Simulator simplified(const CacheConfig& cache);

    void step(const MemoryAccess& access);
    void run(std::span<const MemoryAccess> trace);

    void set_event_hook(EventHook hook) { hook_ = std::move(hook); }

    const LlcCache& cache() const { return cache_; }
    PrefetchEngine& engine() { return engine_; }
    const PrefetchEngine& engine() const { return engine_; }

    std::uint64_t demand_accesses() const { return cache_.stats().demand_accesses; }
    std::uint64_t demand_misses() const { return cache_.stats().misses; }
    std::uint64_t issued() const { return issued_; }
    std::uint64_t useful() const { return useful_; }

private:
    Simulator(const CacheConfig& cache, detail::SimAssembly assembly);

    LlcCache cache_;
    PrefetchEngine engine_;
    EventHook hook_;
    std::uint64_t issued_ = 0;
    std::uint64_t useful_ = 0;
};

struct StorageBreakdown {
    std::uint64_t table_payload_bits = 0;
    std::uint64_t replacement_state_bits = 0;
    std::uint64_t hint_buffer_bits = 0;
    std::uint64_t victim_buffer_bits = 0;
};

struct PcReportRow {
    std::uint64_t pc = 0;
    PcStats stats;
};

struct SimReport {
    std::string run_id;
    std::string policy;
    std::uint64_t demand_accesses = 0;
    std::uint64_t demand_misses = 0;
    std::uint64_t issued = 0;
    std::uint64_t useful = 0;
    double coverage = 0.0;
    double accuracy = 0.0;
    // Demand misses plus prefetch fills that actually brought a line in.
    std::uint64_t traffic_proxy = 0;
    std::uint64_t baseline_misses = 0;
    std::uint32_t metadata_ways = 0;
    std::uint64_t seed = 0;
    StorageBreakdown storage;
    std::vector<PcReportRow> per_pc;
};

/// Runs the no-prefetch baseline (metadata_ways = 0) for the coverage
/// denominator, then the configured policy. Throws Error{Usage} for Prophet
/// without a manifest.
SimReport simulate(std::span<const MemoryAccess> trace, const SimConfig& config,
                   const HintManifest* manifest = nullptr);

/// (baseline_misses - misses) / baseline_misses; 0 when the baseline never misses.
double coverage(std::uint64_t baseline_misses, std::uint64_t misses);

inline constexpr char kReportCsvHeader[] =
    "run_id,policy,demand_accesses,demand_misses,issued,useful,coverage,accuracy,traffic_proxy";
inline constexpr char kPcReportCsvHeader[] = "pc,issued,useful,demand_misses,accuracy";

std::string format_fraction(double value);
std::string report_csv_row(const SimReport& report);
void write_report_csv(std::ostream& out, const SimReport& report);
void write_pc_report_csv(std::ostream& out, const SimReport& report);

}  // namespace prophet
