#include "prophet/victim_buffer.hpp"

#include <algorithm>
#include <bit>

#include "prophet/error.hpp"

namespace prophet {

VictimBuffer::VictimBuffer(const VictimBufferConfig& config, const KeyCodec& codec)
    : config_(config), codec_(codec) {
    if (config_.ways == 0 || config_.entries % config_.ways != 0)
        throw Error(ErrorKind::UnsupportedSpec, "victim buffer entries must be a multiple of its ways");
    sets_ = config_.entries / config_.ways;
    if (!std::has_single_bit(sets_))
        throw Error(ErrorKind::UnsupportedSpec, "victim buffer set count must be a power of two");
    if (config_.candidates_per_entry < 1 || config_.candidates_per_entry > 3)
        throw Error(ErrorKind::UnsupportedSpec, "candidates_per_entry must be 1, 2 or 3");
    entries_.assign(config_.entries, VictimEntry{});
}

VictimEntry& VictimBuffer::choose_victim(std::uint64_t set) {
    auto* first = &entries_[set * config_.ways];
    auto* best = first;
    for (std::uint32_t w = 0; w < config_.ways; ++w) {
        auto& e = first[w];
        if (!e.valid) return e;
        if (e.use_counter < best->use_counter ||
            (e.use_counter == best->use_counter && e.lru_stamp < best->lru_stamp))
            best = &e;
    }
    return *best;
}

void VictimBuffer::insert(const MetadataEntry& evicted) {
    if (evicted.priority == 0) return;
    const auto set = set_of_key(evicted.key);
    auto* first = &entries_[set * config_.ways];
    for (std::uint32_t w = 0; w < config_.ways; ++w) {
        const auto& e = first[w];
        if (e.valid && e.key == evicted.key && e.target == evicted.target) return;
    }
    auto& slot = choose_victim(set);
    slot = VictimEntry{evicted.key, evicted.target, 0, ++clock_, true};
}

std::vector<std::uint64_t> VictimBuffer::lookup(std::uint64_t line_addr,
                                                std::optional<std::uint64_t> primary_target) {
    const auto key = codec_.key_of(line_addr);
    auto* first = &entries_[set_of_key(key) * config_.ways];

    std::vector<VictimEntry*> hits;
    for (std::uint32_t w = 0; w < config_.ways; ++w) {
        auto& e = first[w];
        if (!e.valid || e.key != key) continue;
        if (primary_target && codec_.decompress_target(line_addr, e.target) == *primary_target)
            continue;
        hits.push_back(&e);
    }
    // Most used first, then most recent.
    std::sort(hits.begin(), hits.end(), [](const VictimEntry* a, const VictimEntry* b) {
        if (a->use_counter != b->use_counter) return a->use_counter > b->use_counter;
        return a->lru_stamp > b->lru_stamp;
    });
    if (hits.size() > config_.candidates_per_entry) hits.resize(config_.candidates_per_entry);

    std::vector<std::uint64_t> out;
    out.reserve(hits.size());
    for (auto* e : hits) {
        if (e->use_counter < kVictimCounterMax) ++e->use_counter;
        e->lru_stamp = ++clock_;
        out.push_back(codec_.decompress_target(line_addr, e->target));
    }
    return out;
}

std::uint64_t VictimBuffer::occupancy() const {
    return static_cast<std::uint64_t>(
        std::count_if(entries_.begin(), entries_.end(), [](const VictimEntry& e) { return e.valid; }));
}

std::vector<VictimEntry> VictimBuffer::set_contents(std::uint64_t set) const {
    return {entries_.begin() + static_cast<std::ptrdiff_t>(set * config_.ways),
            entries_.begin() + static_cast<std::ptrdiff_t>((set + 1) * config_.ways)};
}

}  // namespace prophet
