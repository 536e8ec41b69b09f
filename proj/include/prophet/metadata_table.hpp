#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "prophet/cache.hpp"

namespace prophet {

inline constexpr unsigned kTableTagBits = 10;
inline constexpr unsigned kTableTargetBits = 31;
inline constexpr unsigned kTableEntryBits = kTableTagBits + kTableTargetBits;  // 41
inline constexpr unsigned kReplacementStateBits = 2;
/// 1 MB of 64 B lines at 12 entries per line.
inline constexpr std::uint64_t kMaxTableEntries = (1u << 20) / kLineBytes * kEntriesPerTableLine;

enum class ReplacementMode { ProphetPriorityLru, Srrip, Lru };

ReplacementMode parse_replacement_mode(const std::string& name);
std::string to_string(ReplacementMode mode);

struct TableConfig {
    std::uint64_t sets = 2048;
    std::uint32_t assoc_entries_per_set = 8 * kEntriesPerTableLine;
    ReplacementMode replacement = ReplacementMode::ProphetPriorityLru;
    // Full-width keys and targets with no capacity bound. Used by oracle
    // comparisons; not a hardware configuration.
    bool unbounded = false;

    std::uint64_t entry_capacity() const { return sets * assoc_entries_per_set; }
};

/// Table carved out of `metadata_ways` ways of every LLC set.
TableConfig table_config_for(const CacheConfig& cache, std::uint32_t metadata_ways,
                             ReplacementMode mode);

/// Fixed 1 MB table (196,608 entries) indexed with the LLC's set count.
TableConfig simplified_table_config(const CacheConfig& cache, ReplacementMode mode);

/// Packed Markov correlation. `key` holds the bits the table can distinguish
/// (set index plus 10-bit tag); `target` holds the low 31 bits of the
/// successor line. In unbounded mode both are full width.
struct MetadataEntry {
    std::uint64_t key = 0;
    std::uint64_t target = 0;
    std::uint8_t priority = 0;
    std::uint64_t lru_stamp = 0;
    std::uint8_t rrpv = 0;
    bool valid = false;
};

enum class InsertKind { Inserted, Overwritten, Evicted, Dropped };

struct InsertOutcome {
    InsertKind kind = InsertKind::Inserted;
    // Entry removed to make room (Evicted).
    std::optional<MetadataEntry> evicted;
    // Previous contents of an overwritten key whose target changed.
    std::optional<MetadataEntry> displaced;
};

struct TableStorage {
    std::uint64_t payload_bits = 0;
    std::uint64_t replacement_bits = 0;
    std::uint64_t total_bits = 0;
};

/// Address compression shared by the table and the victim buffer.
class KeyCodec {
public:
    KeyCodec() = default;
    KeyCodec(unsigned set_bits, bool full_width) : set_bits_(set_bits), full_width_(full_width) {}

    std::uint64_t set_of(std::uint64_t line_addr) const {
        return line_addr & ((std::uint64_t{1} << set_bits_) - 1);
    }
    std::uint64_t key_of(std::uint64_t line_addr) const {
        if (full_width_) return line_addr;
        return line_addr & ((std::uint64_t{1} << (set_bits_ + kTableTagBits)) - 1);
    }
    std::uint64_t tag_of_key(std::uint64_t key) const {
        if (full_width_) return key >> set_bits_;
        return (key >> set_bits_) & ((1u << kTableTagBits) - 1);
    }
    std::uint64_t compress_target(std::uint64_t target) const {
        if (full_width_) return target;
        return target & ((std::uint64_t{1} << kTableTargetBits) - 1);
    }
    /// Splices the trigger's high bits above the stored 31-bit target.
    std::uint64_t decompress_target(std::uint64_t trigger, std::uint64_t stored) const {
        if (full_width_) return stored;
        constexpr auto mask = (std::uint64_t{1} << kTableTargetBits) - 1;
        return (trigger & ~mask) | stored;
    }
    unsigned set_bits() const { return set_bits_; }
    bool full_width() const { return full_width_; }

private:
    unsigned set_bits_ = 0;
    bool full_width_ = false;
};

/// On-chip Markov table: set-associative, one target per key, Prophet 2-bit
/// priority replacement with LRU tiebreak, plus SRRIP and LRU baselines.
class MetadataTable {
public:
    explicit MetadataTable(const TableConfig& config);

    /// Hit refreshes recency (rrpv := 0 under SRRIP). No insertion side effect.
    std::optional<std::uint64_t> lookup(std::uint64_t line_addr);

    /// Overwrites in place on key match; otherwise fills a free slot or
    /// evicts per the replacement mode. priority must be < 4.
    InsertOutcome insert(std::uint64_t line_addr, std::uint64_t target, std::uint8_t priority);

    std::uint64_t occupancy() const { return occupancy_; }
    std::uint64_t insertions() const { return insertions_; }
    std::uint64_t evictions() const { return evictions_; }
    std::uint64_t overwrites() const { return overwrites_; }
    /// Evictions plus in-place overwrites, so that
    /// occupancy() == insertions() - replacements().
    std::uint64_t replacements() const { return evictions_ + overwrites_; }

    /// Direct scan of valid entries, independent of the running counter.
    std::uint64_t scan_occupancy() const;

    std::uint64_t capacity() const { return config_.unbounded ? 0 : config_.entry_capacity(); }
    const TableConfig& config() const { return config_; }
    const KeyCodec& codec() const { return codec_; }

    std::vector<MetadataEntry> set_contents(std::uint64_t set) const;

    TableStorage storage_report() const { return storage_for(config_.entry_capacity()); }
    static TableStorage storage_for(std::uint64_t capacity);

private:
    MetadataEntry* find(std::uint64_t key);
    MetadataEntry& choose_victim(std::uint64_t set);

    TableConfig config_;
    KeyCodec codec_;
    std::vector<MetadataEntry> entries_;                      // bounded mode
    std::unordered_map<std::uint64_t, MetadataEntry> map_;    // unbounded mode
    std::uint64_t clock_ = 0;
    std::uint64_t occupancy_ = 0;
    std::uint64_t insertions_ = 0;
    std::uint64_t evictions_ = 0;
    std::uint64_t overwrites_ = 0;
};

}  // namespace prophet
