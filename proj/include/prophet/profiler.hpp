#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "prophet/cache.hpp"
#include "prophet/trace.hpp"

namespace prophet {

inline constexpr char kCounterHeader[] = "PRFCNT01";

/// Per-instruction counters: issued and useful prefetches (sampled), demand
/// misses (exact).
struct PcCounters {
    std::uint64_t pc = 0;
    std::uint64_t issued = 0;
    std::uint64_t useful = 0;
    std::uint64_t demand_misses = 0;

    double accuracy() const {
        return issued == 0 ? 0.0 : static_cast<double>(useful) / static_cast<double>(issued);
    }

    friend bool operator==(const PcCounters&, const PcCounters&) = default;
};

/// Application-level counters; allocated_entries_end = insertions - replacements.
struct AppCounters {
    std::uint64_t insertions = 0;
    std::uint64_t replacements = 0;
    std::uint64_t allocated_entries_end = 0;
    std::uint64_t loop_index_l = 0;

    friend bool operator==(const AppCounters&, const AppCounters&) = default;
};

struct CounterFile {
    std::vector<PcCounters> pcs;  // ascending pc
    AppCounters app;

    friend bool operator==(const CounterFile&, const CounterFile&) = default;
};

enum class SamplingMode {
    // Every k-th event of each kind per PC is recorded and scaled by k.
    EveryKth,
    // Each event recorded with probability 1/k, scaled by k; seeded.
    Random,
};

struct ProfileOptions {
    std::uint64_t sample_period = 1;
    SamplingMode sampling = SamplingMode::EveryKth;
    std::uint64_t seed = 1;
    CacheConfig cache{2u << 20, 16, kLineBytes, 8};
};

/// Runs the trace through the simplified prefetcher (degree 1, fixed 1 MB
/// table, no insertion filter) and collects counters. Throws Error{Usage} on
/// an empty trace or a zero sample period.
CounterFile profile(std::span<const MemoryAccess> trace, const ProfileOptions& options = {});

/// PCs by demand misses descending, ties by PC ascending, at most k.
std::vector<std::uint64_t> top_miss_pcs(std::span<const PcCounters> counters, std::size_t k = 128);

CounterFile read_counters(std::istream& in);
CounterFile load_counters(const std::filesystem::path& path);
void write_counters(std::ostream& out, const CounterFile& counters);
void save_counters(const std::filesystem::path& path, const CounterFile& counters);

}  // namespace prophet
