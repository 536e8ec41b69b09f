#include "prophet/metadata_table.hpp"

#include <bit>

#include "prophet/error.hpp"

namespace prophet {

namespace {
constexpr std::uint8_t kSrripMax = 3;
constexpr std::uint8_t kSrripInsert = 2;
}  // namespace

ReplacementMode parse_replacement_mode(const std::string& name) {
    if (name == "prophet") return ReplacementMode::ProphetPriorityLru;
    if (name == "srrip") return ReplacementMode::Srrip;
    if (name == "lru") return ReplacementMode::Lru;
    throw Error(ErrorKind::Usage, "unknown replacement mode '" + name + "'");
}

std::string to_string(ReplacementMode mode) {
    switch (mode) {
    case ReplacementMode::ProphetPriorityLru: return "prophet";
    case ReplacementMode::Srrip: return "srrip";
    case ReplacementMode::Lru: return "lru";
    }
    return "unknown";
}

TableConfig table_config_for(const CacheConfig& cache, std::uint32_t metadata_ways,
                             ReplacementMode mode) {
    TableConfig t;
    t.sets = cache.sets();
    t.assoc_entries_per_set = metadata_ways * kEntriesPerTableLine;
    t.replacement = mode;
    return t;
}

TableConfig simplified_table_config(const CacheConfig& cache, ReplacementMode mode) {
    TableConfig t;
    t.sets = cache.sets();
    if (t.sets == 0 || kMaxTableEntries % t.sets != 0)
        throw Error(ErrorKind::UnsupportedSpec, "LLC set count does not divide the 1 MB table");
    t.assoc_entries_per_set = static_cast<std::uint32_t>(kMaxTableEntries / t.sets);
    t.replacement = mode;
    return t;
}

MetadataTable::MetadataTable(const TableConfig& config) : config_(config) {
    if (config_.sets == 0 || !std::has_single_bit(config_.sets))
        throw Error(ErrorKind::UnsupportedSpec, "metadata table set count must be a power of two");
    if (!config_.unbounded && config_.entry_capacity() > kMaxTableEntries)
        throw Error(ErrorKind::Capacity, "metadata table exceeds the 1 MB (196,608-entry) cap");
    codec_ = KeyCodec(static_cast<unsigned>(std::countr_zero(config_.sets)), config_.unbounded);
    if (!config_.unbounded) entries_.assign(config_.entry_capacity(), MetadataEntry{});
}

MetadataEntry* MetadataTable::find(std::uint64_t key) {
    if (config_.unbounded) {
        auto it = map_.find(key);
        return it == map_.end() ? nullptr : &it->second;
    }
    const auto assoc = config_.assoc_entries_per_set;
    const auto base = (key & (config_.sets - 1)) * assoc;
    for (std::uint32_t w = 0; w < assoc; ++w) {
        auto& e = entries_[base + w];
        if (e.valid && e.key == key) return &e;
    }
    return nullptr;
}

std::optional<std::uint64_t> MetadataTable::lookup(std::uint64_t line_addr) {
    auto* e = find(codec_.key_of(line_addr));
    if (e == nullptr) return std::nullopt;
    e->lru_stamp = ++clock_;
    e->rrpv = 0;
    return codec_.decompress_target(line_addr, e->target);
}

MetadataEntry& MetadataTable::choose_victim(std::uint64_t set) {
    const auto assoc = config_.assoc_entries_per_set;
    auto* first = &entries_[set * assoc];
    for (std::uint32_t w = 0; w < assoc; ++w)
        if (!first[w].valid) return first[w];

    switch (config_.replacement) {
    case ReplacementMode::Srrip:
        while (true) {
            for (std::uint32_t w = 0; w < assoc; ++w)
                if (first[w].rrpv >= kSrripMax) return first[w];
            for (std::uint32_t w = 0; w < assoc; ++w) ++first[w].rrpv;
        }
    case ReplacementMode::Lru: {
        auto* best = first;
        for (std::uint32_t w = 1; w < assoc; ++w)
            if (first[w].lru_stamp < best->lru_stamp) best = &first[w];
        return *best;
    }
    case ReplacementMode::ProphetPriorityLru: {
        // Lowest priority level first, LRU among those candidates.
        auto* best = first;
        for (std::uint32_t w = 1; w < assoc; ++w) {
            const auto& e = first[w];
            if (e.priority < best->priority ||
                (e.priority == best->priority && e.lru_stamp < best->lru_stamp))
                best = &first[w];
        }
        return *best;
    }
    }
    return *first;
}

InsertOutcome MetadataTable::insert(std::uint64_t line_addr, std::uint64_t target,
                                    std::uint8_t priority) {
    if (priority > 3) throw Error(ErrorKind::Contract, "priority must be in [0,3]");
    const auto key = codec_.key_of(line_addr);
    const auto stored = codec_.compress_target(target);

    if (!config_.unbounded && config_.assoc_entries_per_set == 0)
        return {InsertKind::Dropped, std::nullopt, std::nullopt};

    ++insertions_;
    InsertOutcome out;
    if (auto* e = find(key)) {
        ++overwrites_;
        if (e->target != stored) out.displaced = *e;
        e->target = stored;
        e->priority = priority;
        e->lru_stamp = ++clock_;
        e->rrpv = 0;
        out.kind = InsertKind::Overwritten;
        return out;
    }

    MetadataEntry fresh;
    fresh.key = key;
    fresh.target = stored;
    fresh.priority = priority;
    fresh.lru_stamp = ++clock_;
    fresh.rrpv = kSrripInsert;
    fresh.valid = true;

    if (config_.unbounded) {
        map_.emplace(key, fresh);
        ++occupancy_;
        out.kind = InsertKind::Inserted;
        return out;
    }

    auto& slot = choose_victim(codec_.set_of(key));
    if (slot.valid) {
        ++evictions_;
        out.kind = InsertKind::Evicted;
        out.evicted = slot;
    } else {
        ++occupancy_;
        out.kind = InsertKind::Inserted;
    }
    slot = fresh;
    return out;
}

std::uint64_t MetadataTable::scan_occupancy() const {
    if (config_.unbounded) return map_.size();
    std::uint64_t n = 0;
    for (const auto& e : entries_) n += e.valid ? 1 : 0;
    return n;
}

std::vector<MetadataEntry> MetadataTable::set_contents(std::uint64_t set) const {
    if (config_.unbounded) return {};
    const auto assoc = config_.assoc_entries_per_set;
    return {entries_.begin() + static_cast<std::ptrdiff_t>(set * assoc),
            entries_.begin() + static_cast<std::ptrdiff_t>((set + 1) * assoc)};
}

TableStorage MetadataTable::storage_for(std::uint64_t capacity) {
    TableStorage s;
    s.payload_bits = capacity * kTableEntryBits;
    s.replacement_bits = capacity * kReplacementStateBits;
    s.total_bits = s.payload_bits + s.replacement_bits;
    return s;
}

}  // namespace prophet
