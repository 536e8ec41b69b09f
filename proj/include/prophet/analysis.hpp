#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "prophet/cache.hpp"
#include "prophet/hints.hpp"
#include "prophet/profiler.hpp"

namespace prophet {

struct CounterStore;

struct AnalysisParams {
    // Accuracy below which a PC is treated as having no temporal pattern.
    double el_acc = 0.0625;
    // Priority bit-width; levels 0 .. 2^n - 1. At most 2 for the hint encoding.
    unsigned n = 2;
    std::uint64_t llc_sets = 2048;
    std::uint32_t entries_per_line = kEntriesPerTableLine;
    std::uint64_t max_table_bytes = 1u << 20;
    std::size_t top_k = kHintBufferEntries;

    std::uint64_t max_table_entries() const {
        return max_table_bytes / kLineBytes * entries_per_line;
    }
};

/// Throws Error{UnsupportedSpec} unless 0 < el_acc < 1/2^n, 1 <= n <= 2 and
/// llc_sets > 0.
void validate(const AnalysisParams& params);

/// 1 iff acc >= el_acc.
bool insert_decision(double acc, const AnalysisParams& params);

/// Band index floor(acc * 2^n), clamped to 2^n - 1. Throws Error{Contract}
/// for acc < el_acc (callers filter with insert_decision first).
unsigned priority_level(double acc, const AnalysisParams& params);

/// Nearest power of two; exact midpoints round up. 0 maps to 0.
std::uint64_t nearest_power_of_two(std::uint64_t value);

struct ResizeDecision {
    std::uint32_t metadata_ways = 0;
    bool prefetcher_enabled = false;
    std::uint64_t target_entries = 0;
    std::uint64_t target_lines = 0;
    // target_lines / llc_sets before ceil.
    double raw_ways = 0.0;
};

/// Rounds the allocated-entry count to a power of two (capped at the largest
/// power of two a 1 MB table holds), converts entries to table lines and
/// divides by the LLC set count. A quotient below 0.5 disables prefetching;
/// otherwise ways = ceil(quotient).
ResizeDecision resize_decision(std::uint64_t allocated_entries, const AnalysisParams& params);

struct AnalysisRecord {
    std::uint64_t pc = 0;
    double accuracy = 0.0;
    std::uint64_t misses = 0;
};

/// Counter view shared by raw counter files and learned stores.
struct AnalysisInput {
    std::vector<AnalysisRecord> pcs;
    std::uint64_t allocated_entries = 0;
};

/// acc = useful / issued, and 0 for a PC that never issued.
AnalysisInput analysis_input(const CounterFile& counters);
AnalysisInput analysis_input(const CounterStore& store);

/// Top-k PCs by misses become hint lines; the CSR block carries the resizing
/// decision. Deterministic.
HintManifest analyze(const AnalysisInput& input, const AnalysisParams& params);

}  // namespace prophet
