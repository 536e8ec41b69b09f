#include "prophet/cache.hpp"

#include <bit>
#include <string>
#include <utility>

#include "prophet/error.hpp"

namespace prophet {

void validate(const CacheConfig& config) {
    if (config.line_size != kLineBytes)
        throw Error(ErrorKind::UnsupportedSpec, "line size must be 64 bytes");
    if (config.ways == 0) throw Error(ErrorKind::UnsupportedSpec, "cache needs at least one way");
    auto sets = config.sets();
    if (sets == 0 || !std::has_single_bit(sets) ||
        sets * config.ways * config.line_size != config.total_size)
        throw Error(ErrorKind::UnsupportedSpec,
                    "cache size must be sets x ways x 64 with a power-of-two set count");
    if (config.metadata_ways > config.ways)
        throw Error(ErrorKind::UnsupportedSpec, "metadata_ways exceeds associativity");
}

LlcCache::LlcCache(const CacheConfig& config) : config_(config) {
    validate(config_);
    sets_ = config_.sets();
    set_bits_ = static_cast<unsigned>(std::countr_zero(sets_));
    lines_.assign(sets_ * data_ways(), CacheLineState{});
}

void LlcCache::set_partition(std::uint32_t metadata_ways) {
    if (touched_)
        throw Error(ErrorKind::Usage, "set_partition is only legal before the first access");
    if (metadata_ways > config_.ways)
        throw Error(ErrorKind::Usage, "metadata_ways " + std::to_string(metadata_ways) +
                                          " exceeds associativity");
    config_.metadata_ways = metadata_ways;
    lines_.assign(sets_ * data_ways(), CacheLineState{});
}

CacheLineState* LlcCache::find(std::uint64_t line_addr) {
    return const_cast<CacheLineState*>(std::as_const(*this).find(line_addr));
}

const CacheLineState* LlcCache::find(std::uint64_t line_addr) const {
    const auto set = line_addr & (sets_ - 1);
    const auto tag = line_addr >> set_bits_;
    const auto ways = data_ways();
    for (std::uint32_t w = 0; w < ways; ++w) {
        const auto& line = lines_[set * ways + w];
        if (line.valid && line.tag == tag) return &line;
    }
    return nullptr;
}

CacheLineState& LlcCache::victim(std::uint64_t set) {
    const auto ways = data_ways();
    CacheLineState* best = &lines_[set * ways];
    for (std::uint32_t w = 0; w < ways; ++w) {
        auto& line = lines_[set * ways + w];
        if (!line.valid) return line;
        if (line.lru_stamp < best->lru_stamp) best = &line;
    }
    return *best;
}

CacheLineState& LlcCache::install(std::uint64_t line_addr) {
    auto& slot = victim(line_addr & (sets_ - 1));
    slot = CacheLineState{};
    slot.valid = true;
    slot.tag = line_addr >> set_bits_;
    slot.lru_stamp = ++clock_;
    return slot;
}

DemandResult LlcCache::demand_access(std::uint64_t line_addr) {
    touched_ = true;
    ++stats_.demand_accesses;
    if (auto* line = find(line_addr)) {
        ++stats_.hits;
        line->lru_stamp = ++clock_;
        if (line->prefetched) {
            DemandResult r{DemandOutcome::HitOnPrefetch, line->issuing_pc};
            line->prefetched = false;
            line->issuing_pc.reset();
            return r;
        }
        return {DemandOutcome::Hit, std::nullopt};
    }
    ++stats_.misses;
    if (data_ways() > 0) install(line_addr);
    return {DemandOutcome::Miss, std::nullopt};
}

FillResult LlcCache::prefetch_fill(std::uint64_t line_addr, std::uint64_t issuing_pc) {
    touched_ = true;
    ++stats_.prefetch_fills;
    // With no data ways nothing can be filled; report it as redundant.
    if (find(line_addr) != nullptr || data_ways() == 0) {
        ++stats_.redundant_fills;
        return FillResult::AlreadyPresent;
    }
    auto& line = install(line_addr);
    line.prefetched = true;
    line.issuing_pc = issuing_pc;
    return FillResult::Inserted;
}

void LlcCache::untracked_fill(std::uint64_t line_addr) {
    touched_ = true;
    if (auto* line = find(line_addr)) {
        line->lru_stamp = ++clock_;
        return;
    }
    if (data_ways() > 0) install(line_addr);
}

bool LlcCache::contains(std::uint64_t line_addr) const { return find(line_addr) != nullptr; }

std::vector<CacheLineState> LlcCache::set_contents(std::uint64_t set) const {
    const auto ways = data_ways();
    return {lines_.begin() + static_cast<std::ptrdiff_t>(set * ways),
            lines_.begin() + static_cast<std::ptrdiff_t>((set + 1) * ways)};
}

}  // namespace prophet
