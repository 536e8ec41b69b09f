#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "prophet/metadata_table.hpp"

namespace prophet {

inline constexpr std::uint64_t kDefaultVictimEntries = 65536;
inline constexpr std::uint32_t kVictimWays = 16;
inline constexpr unsigned kVictimEntryBits = kTableTargetBits + kTableTagBits + 2;  // 43
inline constexpr std::uint8_t kVictimCounterMax = 3;

struct VictimBufferConfig {
    std::uint64_t entries = kDefaultVictimEntries;
    std::uint32_t ways = kVictimWays;
    // Extra targets returned per lookup, 1 to 3.
    std::uint32_t candidates_per_entry = 1;
};

struct VictimEntry {
    std::uint64_t key = 0;
    std::uint64_t target = 0;
    std::uint8_t use_counter = 0;
    std::uint64_t lru_stamp = 0;
    bool valid = false;
};

/// Multi-path victim buffer: keeps Markov targets displaced from the metadata
/// table so that an address with several successors can prefetch more than
/// one. Indexed by the table's compressed key.
class VictimBuffer {
public:
    VictimBuffer(const VictimBufferConfig& config, const KeyCodec& codec);

    /// Stored iff priority > 0; an existing (key, target) pair is not duplicated.
    void insert(const MetadataEntry& evicted);

    /// Targets for `line_addr` other than `primary_target`, best first, at
    /// most candidates_per_entry. Bumps the use counters of returned entries.
    std::vector<std::uint64_t> lookup(std::uint64_t line_addr,
                                      std::optional<std::uint64_t> primary_target);

    std::uint64_t occupancy() const;
    std::uint64_t capacity() const { return sets_ * config_.ways; }
    const VictimBufferConfig& config() const { return config_; }
    std::vector<VictimEntry> set_contents(std::uint64_t set) const;
    std::uint64_t set_of_key(std::uint64_t key) const { return key & (sets_ - 1); }

    static std::uint64_t storage_bits(std::uint64_t entries) { return entries * kVictimEntryBits; }

private:
    VictimEntry& choose_victim(std::uint64_t set);

    VictimBufferConfig config_;
    KeyCodec codec_;
    std::uint64_t sets_ = 0;
    std::vector<VictimEntry> entries_;
    std::uint64_t clock_ = 0;
};

}  // namespace prophet
