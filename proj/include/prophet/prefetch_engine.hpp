#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "prophet/cache.hpp"
#include "prophet/hints.hpp"
#include "prophet/metadata_table.hpp"
#include "prophet/trace.hpp"
#include "prophet/victim_buffer.hpp"

namespace prophet {

enum class InsertionMode { ProphetHints, NoFilter, PatternConfBaseline };

/// PerPc tracks the last line per instruction; Global tracks a single last
/// line for the whole stream.
enum class TrainingScope { PerPc, Global };

struct PrefetcherConfig {
    std::uint32_t degree = 1;
    InsertionMode insertion = InsertionMode::NoFilter;
    ReplacementMode replacement = ReplacementMode::Lru;
    bool victim_buffer_enabled = false;
    VictimBufferConfig victim_buffer;
    bool simplified_mode = false;
    TrainingScope scope = TrainingScope::PerPc;
    bool train_on_l1_fills = true;
};

/// Profiling configuration: no insertion filter, degree 1. The fixed 1 MB
/// table is chosen by the caller through simplified_table_config().
PrefetcherConfig simplified_prefetcher_config();

InsertionMode parse_insertion_mode(const std::string& name);
TrainingScope parse_training_scope(const std::string& name);

struct PcStats {
    std::uint64_t issued = 0;
    std::uint64_t useful = 0;
    std::uint64_t demand_misses = 0;

    /// useful / issued, or 0 when nothing was issued.
    double accuracy() const {
        return issued == 0 ? 0.0 : static_cast<double>(useful) / static_cast<double>(issued);
    }
};

inline constexpr int kPatternConfMax = 15;
inline constexpr int kPatternConfThreshold = 8;

/// Temporal prefetcher: trains address successions into the metadata table,
/// walks the Markov chain on demand accesses and keeps per-PC statistics.
class PrefetchEngine {
public:
    PrefetchEngine(const PrefetcherConfig& config, const TableConfig& table,
                   HintBuffer hints = {});

    /// Trains on one access. `hint` is consulted only in ProphetHints mode;
    /// an absent hint means the default (insert, priority 3).
    void train(const MemoryAccess& access, std::optional<Hint> hint);
    /// Same, with the hint taken from the engine's hint buffer.
    void train(const MemoryAccess& access);

    /// Prefetch candidates for a demand access: up to `degree` chained table
    /// targets plus victim-buffer alternatives at each step. Never contains
    /// the trigger and never repeats an address.
    std::vector<std::uint64_t> on_demand(const MemoryAccess& access);

    /// Every fill attempt counts as issued, redundant ones included.
    void record_issue(std::uint64_t pc, FillResult result);
    void record_useful(std::uint64_t pc);
    void record_demand_miss(std::uint64_t pc);

    bool enabled() const;
    double accuracy(std::uint64_t pc) const;
    const std::map<std::uint64_t, PcStats>& pc_stats() const { return stats_; }
    std::uint64_t redundant_issues() const { return redundant_; }

    MetadataTable& table() { return table_; }
    const MetadataTable& table() const { return table_; }
    VictimBuffer* victim_buffer() { return victim_.get(); }
    const HintBuffer& hints() const { return hints_; }
    const PrefetcherConfig& config() const { return config_; }

    std::optional<std::uint64_t> last_addr(std::uint64_t pc) const;
    /// PatternConf saturating counter; kPatternConfThreshold for unseen PCs.
    int pattern_conf(std::uint64_t pc) const;

private:
    void store_correlation(std::uint64_t from, std::uint64_t to, std::uint8_t priority);
    bool pattern_conf_allows(std::uint64_t pc, std::uint64_t prev, std::uint64_t cur);

    PrefetcherConfig config_;
    MetadataTable table_;
    std::unique_ptr<VictimBuffer> victim_;
    HintBuffer hints_;
    std::unordered_map<std::uint64_t, std::uint64_t> last_addr_;
    std::unordered_map<std::uint64_t, int> pattern_conf_;
    // Per-PC record of the successor last seen after each line; drives the
    // PatternConf counter independently of what the table kept.
    std::unordered_map<std::uint64_t, std::unordered_map<std::uint64_t, std::uint64_t>> history_;
    std::map<std::uint64_t, PcStats> stats_;
    std::uint64_t redundant_ = 0;
};

}  // namespace prophet
