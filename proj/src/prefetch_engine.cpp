#include "prophet/prefetch_engine.hpp"

#include <algorithm>

#include "prophet/error.hpp"

namespace prophet {

PrefetcherConfig simplified_prefetcher_config() {
    PrefetcherConfig c;
    c.degree = 1;
    c.insertion = InsertionMode::NoFilter;
    c.replacement = ReplacementMode::Lru;
    c.victim_buffer_enabled = false;
    c.simplified_mode = true;
    return c;
}

InsertionMode parse_insertion_mode(const std::string& name) {
    if (name == "prophet") return InsertionMode::ProphetHints;
    if (name == "nofilter") return InsertionMode::NoFilter;
    if (name == "patternconf") return InsertionMode::PatternConfBaseline;
    throw Error(ErrorKind::Usage, "unknown insertion mode '" + name + "'");
}

TrainingScope parse_training_scope(const std::string& name) {
    if (name == "per_pc") return TrainingScope::PerPc;
    if (name == "global") return TrainingScope::Global;
    throw Error(ErrorKind::Usage, "unknown training scope '" + name + "'");
}

PrefetchEngine::PrefetchEngine(const PrefetcherConfig& config, const TableConfig& table,
                               HintBuffer hints)
    : config_(config), table_(table), hints_(std::move(hints)) {
    if (config_.degree < 1) throw Error(ErrorKind::UnsupportedSpec, "degree must be >= 1");
    if (config_.simplified_mode) {
        config_.degree = 1;
        config_.insertion = InsertionMode::NoFilter;
        if (!table.unbounded && table.entry_capacity() != kMaxTableEntries)
            throw Error(ErrorKind::UnsupportedSpec, "simplified mode requires the 1 MB table");
    }
    if (config_.victim_buffer_enabled)
        victim_ = std::make_unique<VictimBuffer>(config_.victim_buffer, table_.codec());
}

bool PrefetchEngine::enabled() const {
    return table_.config().unbounded || table_.config().entry_capacity() > 0;
}

void PrefetchEngine::store_correlation(std::uint64_t from, std::uint64_t to,
                                       std::uint8_t priority) {
    auto outcome = table_.insert(from, to, priority);
    if (!victim_) return;
    if (outcome.evicted) victim_->insert(*outcome.evicted);
    if (outcome.displaced) victim_->insert(*outcome.displaced);
}

bool PrefetchEngine::pattern_conf_allows(std::uint64_t pc, std::uint64_t prev,
                                         std::uint64_t cur) {
    auto& seen = history_[pc];
    auto& conf = pattern_conf_.try_emplace(pc, kPatternConfThreshold).first->second;
    auto it = seen.find(prev);
    bool useful = it != seen.end() && it->second == cur;
    conf = useful ? std::min(conf + 1, kPatternConfMax) : std::max(conf - 1, 0);
    seen[prev] = cur;
    return conf >= kPatternConfThreshold;
}

void PrefetchEngine::train(const MemoryAccess& access) {
    train(access, config_.insertion == InsertionMode::ProphetHints ? hints_.find(access.pc)
                                                                   : std::nullopt);
}

void PrefetchEngine::train(const MemoryAccess& access, std::optional<Hint> hint) {
    if (access.kind == AccessKind::L1PrefetchFill && !config_.train_on_l1_fills) return;
    if (!enabled()) return;

    std::uint8_t priority = 3;
    if (config_.insertion == InsertionMode::ProphetHints) {
        auto h = hint.value_or(kDefaultHint);
        if (!h.insert) return;
        priority = h.priority;
    }

    const auto stream = config_.scope == TrainingScope::PerPc ? access.pc : 0;
    auto [it, first] = last_addr_.try_emplace(stream, access.line_addr);
    if (first) return;
    const auto prev = it->second;
    it->second = access.line_addr;
    if (prev == access.line_addr) return;

    if (config_.insertion == InsertionMode::PatternConfBaseline &&
        !pattern_conf_allows(access.pc, prev, access.line_addr))
        return;
    store_correlation(prev, access.line_addr, priority);
}

std::vector<std::uint64_t> PrefetchEngine::on_demand(const MemoryAccess& access) {
    std::vector<std::uint64_t> out;
    if (!enabled() || access.kind != AccessKind::Demand) return out;

    auto emit = [&](std::uint64_t line) {
        if (line == access.line_addr) return;
        if (std::find(out.begin(), out.end(), line) != out.end()) return;
        out.push_back(line);
    };

    auto cur = access.line_addr;
    for (std::uint32_t step = 0; step < config_.degree; ++step) {
        auto next = table_.lookup(cur);
        if (next) emit(*next);
        if (victim_)
            for (auto alt : victim_->lookup(cur, next)) emit(alt);
        if (!next) break;
        cur = *next;
    }
    return out;
}

void PrefetchEngine::record_issue(std::uint64_t pc, FillResult result) {
    ++stats_[pc].issued;
    if (result == FillResult::AlreadyPresent) ++redundant_;
}

void PrefetchEngine::record_useful(std::uint64_t pc) { ++stats_[pc].useful; }

void PrefetchEngine::record_demand_miss(std::uint64_t pc) { ++stats_[pc].demand_misses; }

double PrefetchEngine::accuracy(std::uint64_t pc) const {
    auto it = stats_.find(pc);
    return it == stats_.end() ? 0.0 : it->second.accuracy();
}

std::optional<std::uint64_t> PrefetchEngine::last_addr(std::uint64_t pc) const {
    auto it = last_addr_.find(config_.scope == TrainingScope::PerPc ? pc : 0);
    if (it == last_addr_.end()) return std::nullopt;
    return it->second;
}

int PrefetchEngine::pattern_conf(std::uint64_t pc) const {
    auto it = pattern_conf_.find(pc);
    return it == pattern_conf_.end() ? kPatternConfThreshold : it->second;
}

}  // namespace prophet
