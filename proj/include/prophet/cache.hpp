#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace prophet {

inline constexpr std::uint32_t kLineBytes = 64;
inline constexpr std::uint32_t kEntriesPerTableLine = 12;

/// LLC geometry. Defaults: 2 MB, 16-way, 64 B lines.
struct CacheConfig {
    std::uint64_t total_size = 2u << 20;
    std::uint32_t ways = 16;
    std::uint32_t line_size = kLineBytes;
    std::uint32_t metadata_ways = 0;

    std::uint64_t sets() const { return total_size / (std::uint64_t{ways} * line_size); }
};

/// Throws Error{UnsupportedSpec} unless total_size = sets * ways * 64 with
/// sets a power of two and metadata_ways <= ways.
void validate(const CacheConfig& config);

enum class DemandOutcome { Hit, HitOnPrefetch, Miss };

struct DemandResult {
    DemandOutcome outcome = DemandOutcome::Miss;
    std::optional<std::uint64_t> issuing_pc;  // set for HitOnPrefetch only
};

enum class FillResult { Inserted, AlreadyPresent };

struct CacheLineState {
    std::uint64_t tag = 0;
    bool valid = false;
    bool prefetched = false;
    std::optional<std::uint64_t> issuing_pc;
    std::uint64_t lru_stamp = 0;
};

struct CacheStats {
    std::uint64_t demand_accesses = 0;
    std::uint64_t hits = 0;
    std::uint64_t misses = 0;
    std::uint64_t prefetch_fills = 0;
    std::uint64_t redundant_fills = 0;
};

/// Set-associative LLC whose ways are split between demand data and the
/// metadata table. Only the data partition is materialised here; the metadata
/// partition's capacity is reported through metadata_entry_capacity() and
/// owned by the MetadataTable. Data replacement is true LRU.
class LlcCache {
public:
    explicit LlcCache(const CacheConfig& config);

    DemandResult demand_access(std::uint64_t line_addr);
    FillResult prefetch_fill(std::uint64_t line_addr, std::uint64_t issuing_pc);

    /// Brings a line in as an ordinary (non-prefetch) line without counting a
    /// demand access. Used for L1 prefetch fills arriving at the LLC.
    void untracked_fill(std::uint64_t line_addr);

    /// Start-of-run only; throws Error{Usage} once any access has happened.
    void set_partition(std::uint32_t metadata_ways);

    bool contains(std::uint64_t line_addr) const;

    std::uint64_t sets() const { return sets_; }
    std::uint32_t ways() const { return config_.ways; }
    std::uint32_t metadata_ways() const { return config_.metadata_ways; }
    std::uint32_t data_ways() const { return config_.ways - config_.metadata_ways; }
    std::uint64_t data_capacity_lines() const { return sets_ * data_ways(); }
    std::uint64_t metadata_entry_capacity() const {
        return sets_ * config_.metadata_ways * kEntriesPerTableLine;
    }

    const CacheStats& stats() const { return stats_; }

    /// Data-partition lines of one set, for invariant checks.
    std::vector<CacheLineState> set_contents(std::uint64_t set) const;

private:
    CacheLineState* find(std::uint64_t line_addr);
    const CacheLineState* find(std::uint64_t line_addr) const;
    CacheLineState& victim(std::uint64_t set);
    CacheLineState& install(std::uint64_t line_addr);

    CacheConfig config_;
    std::uint64_t sets_ = 0;
    unsigned set_bits_ = 0;
    std::vector<CacheLineState> lines_;  // sets_ x data_ways()
    std::uint64_t clock_ = 0;
    bool touched_ = false;
    CacheStats stats_;
};

}  // namespace prophet
