#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>
#include <unordered_map>

#include "helpers.hpp"
#include "prophet/cache.hpp"
#include "prophet/error.hpp"
#include "prophet/prefetch_engine.hpp"

using namespace prophet;
using testing::demand;

namespace {

constexpr std::uint64_t kPc = 0x400a10;
constexpr std::uint64_t A = 0x10000a00, B = 0x10000b00, C = 0x10000c00, D = 0x10000d00;

TableConfig unbounded_table() {
    TableConfig t;
    t.unbounded = true;
    return t;
}

PrefetcherConfig nofilter(std::uint32_t degree = 1) {
    PrefetcherConfig c;
    c.degree = degree;
    return c;
}

// Full-width successor map with per-PC last address: the reference model for
// an unbounded, unfiltered engine.
struct ShadowPrefetcher {
    std::uint32_t degree;
    std::unordered_map<std::uint64_t, std::uint64_t> succ;
    std::unordered_map<std::uint64_t, std::uint64_t> last;

    std::vector<std::uint64_t> predict(const MemoryAccess& a) const {
        std::vector<std::uint64_t> out;
        if (a.kind != AccessKind::Demand) return out;
        auto cur = a.line_addr;
        for (std::uint32_t i = 0; i < degree; ++i) {
            auto it = succ.find(cur);
            if (it == succ.end()) break;
            if (it->second != a.line_addr &&
                std::find(out.begin(), out.end(), it->second) == out.end())
                out.push_back(it->second);
            cur = it->second;
        }
        return out;
    }
    void train(const MemoryAccess& a) {
        auto it = last.find(a.pc);
        if (it != last.end() && it->second != a.line_addr) succ[it->second] = a.line_addr;
        last[a.pc] = a.line_addr;
    }
};

}  // namespace

TEST_CASE("first access of a PC only records its address") {
    PrefetchEngine e(nofilter(), TableConfig{});
    e.train(demand(kPc, A));
    CHECK(e.table().occupancy() == 0);
    CHECK(e.last_addr(kPc) == std::optional<std::uint64_t>(A));
}

TEST_CASE("insert bit 0 discards training") {
    PrefetcherConfig cfg;
    cfg.insertion = InsertionMode::ProphetHints;
    std::vector<HintEntry> hints = {{kPc, {false, 0}}};
    PrefetchEngine e(cfg, TableConfig{}, HintBuffer(hints));
    for (int i = 0; i < 100; ++i) e.train(demand(kPc, 0x10000000 + i % 7));
    CHECK(e.table().occupancy() == 0);
    CHECK(e.table().insertions() == 0);
}

TEST_CASE("A then B trains A to B") {
    PrefetchEngine e(nofilter(), TableConfig{});
    e.train(demand(kPc, A));
    e.train(demand(kPc, B));
    CHECK(e.table().lookup(A) == std::optional<std::uint64_t>(B));
    CHECK(e.on_demand(demand(kPc, A)) == std::vector<std::uint64_t>{B});
}

TEST_CASE("hinted priority is stored with the entry") {
    PrefetcherConfig cfg;
    cfg.insertion = InsertionMode::ProphetHints;
    PrefetchEngine e(cfg, TableConfig{});
    e.train(demand(kPc, A), Hint{true, 1});
    e.train(demand(kPc, B), Hint{true, 1});
    auto set = e.table().set_contents(e.table().codec().set_of(A));
    auto it = std::find_if(set.begin(), set.end(), [](auto& x) { return x.valid; });
    REQUIRE(it != set.end());
    CHECK(it->priority == 1);
}

TEST_CASE("chained prefetch follows the table up to the degree") {
    PrefetchEngine e(nofilter(3), TableConfig{});
    for (auto l : {A, B, C, D}) e.train(demand(kPc, l));
    CHECK(e.on_demand(demand(kPc, A)) == std::vector<std::uint64_t>{B, C, D});
    PrefetchEngine two(nofilter(2), TableConfig{});
    for (auto l : {A, B, C, D}) two.train(demand(kPc, l));
    CHECK(two.on_demand(demand(kPc, A)) == std::vector<std::uint64_t>{B, C});
}

TEST_CASE("chain walk matches the shadow map on random traces") {
    std::mt19937_64 rng(17);
    for (int round = 0; round < 40; ++round) {
        auto degree = static_cast<std::uint32_t>(1 + rng() % 4);
        PrefetchEngine e(nofilter(degree), unbounded_table());
        ShadowPrefetcher shadow{degree, {}, {}};
        for (int i = 0; i < 3000; ++i) {
            MemoryAccess a{0x400000 + 4 * (rng() % 3), 0x10000000 + rng() % 50,
                           rng() % 10 == 0 ? AccessKind::L1PrefetchFill : AccessKind::Demand};
            REQUIRE(e.on_demand(a) == shadow.predict(a));
            e.train(a);
            shadow.train(a);
        }
    }
}

TEST_CASE("victim buffer adds the displaced successor") {
    PrefetcherConfig cfg = nofilter();
    cfg.victim_buffer_enabled = true;
    PrefetchEngine e(cfg, TableConfig{});
    // B -> D first, then B -> C displaces D into the buffer.
    for (auto l : {B, D, B, C}) e.train(demand(kPc, l));
    CHECK(e.table().lookup(B) == std::optional<std::uint64_t>(C));
    CHECK(e.victim_buffer()->occupancy() >= 1);
    CHECK(e.on_demand(demand(kPc, B)) == std::vector<std::uint64_t>{C, D});
}

TEST_CASE("no prefetch repeats or targets the trigger") {
    std::mt19937_64 rng(23);
    PrefetcherConfig cfg = nofilter(4);
    cfg.victim_buffer_enabled = true;
    cfg.victim_buffer.candidates_per_entry = 3;
    TableConfig table;
    table.sets = 16;
    table.assoc_entries_per_set = 12;
    PrefetchEngine e(cfg, table);
    for (int i = 0; i < 30000; ++i) {
        auto a = demand(0x400a10, 0x10000000 + rng() % 40);
        auto out = e.on_demand(a);
        for (std::size_t k = 0; k < out.size(); ++k) {
            REQUIRE(out[k] != a.line_addr);
            for (std::size_t j = 0; j < k; ++j) REQUIRE(out[j] != out[k]);
        }
        e.train(a);
    }
}

TEST_CASE("usefulness attribution through the cache") {
    LlcCache cache(CacheConfig{64 * 2, 2, 64, 0});  // one set, two ways
    PrefetchEngine e(nofilter(), TableConfig{});
    const std::uint64_t p = 0x400a10;

    // issue B, demand hits B
    e.record_issue(p, cache.prefetch_fill(B, p));
    auto r = cache.demand_access(B);
    REQUIRE(r.outcome == DemandOutcome::HitOnPrefetch);
    e.record_useful(*r.issuing_pc);
    CHECK(e.pc_stats().at(p).useful == 1);

    // issue C, evicted before use
    e.record_issue(p, cache.prefetch_fill(C, p));
    cache.demand_access(0x1);
    cache.demand_access(0x2);
    CHECK(cache.demand_access(C).outcome == DemandOutcome::Miss);
    CHECK(e.pc_stats().at(p).useful == 1);
    CHECK(e.pc_stats().at(p).issued == 2);
}

TEST_CASE("a redundant second issue counts as issued but never useful") {
    LlcCache cache(CacheConfig{});
    PrefetchEngine e(nofilter(), TableConfig{});
    const std::uint64_t p = 7;
    e.record_issue(p, cache.prefetch_fill(B, p));
    e.record_issue(p, cache.prefetch_fill(B, p));
    auto r = cache.demand_access(B);
    if (r.outcome == DemandOutcome::HitOnPrefetch) e.record_useful(*r.issuing_pc);
    r = cache.demand_access(B);
    if (r.outcome == DemandOutcome::HitOnPrefetch) e.record_useful(*r.issuing_pc);
    CHECK(e.pc_stats().at(p).issued == 2);
    CHECK(e.pc_stats().at(p).useful == 1);
    CHECK(e.redundant_issues() == 1);
    CHECK(e.accuracy(p) == 0.5);
    CHECK(e.accuracy(12345) == 0.0);
}

TEST_CASE("PatternConf counter rises on confirmed patterns and blocks after misses") {
    PrefetcherConfig cfg;
    cfg.insertion = InsertionMode::PatternConfBaseline;
    PrefetchEngine e(cfg, TableConfig{});
    CHECK(e.pattern_conf(kPc) == kPatternConfThreshold);
    // First pass: nothing recorded yet, every transition counts as a miss.
    e.train(demand(kPc, A));
    e.train(demand(kPc, B));
    CHECK(e.pattern_conf(kPc) == kPatternConfThreshold - 1);
    CHECK(e.table().occupancy() == 0);
    e.train(demand(kPc, A));
    e.train(demand(kPc, B));  // A->B confirmed
    CHECK(e.pattern_conf(kPc) == kPatternConfThreshold - 1);
    for (int i = 0; i < 40; ++i) e.train(demand(kPc, i % 2 ? B : A));
    CHECK(e.pattern_conf(kPc) == kPatternConfMax);
    CHECK(e.table().lookup(A) == std::optional<std::uint64_t>(B));

    for (int i = 0; i < 20; ++i) e.train(demand(kPc, 0x20000000 + 97 * i));
    CHECK(e.pattern_conf(kPc) == 0);
    auto before = e.table().insertions();
    e.train(demand(kPc, C));
    e.train(demand(kPc, D));
    CHECK(e.table().insertions() == before);
}

TEST_CASE("global training scope chains across PCs") {
    PrefetcherConfig cfg = nofilter();
    cfg.scope = TrainingScope::Global;
    PrefetchEngine e(cfg, TableConfig{});
    e.train(demand(1, A));
    e.train(demand(2, B));
    CHECK(e.table().lookup(A) == std::optional<std::uint64_t>(B));

    PrefetchEngine per_pc(nofilter(), TableConfig{});
    per_pc.train(demand(1, A));
    per_pc.train(demand(2, B));
    CHECK(per_pc.table().occupancy() == 0);
}

TEST_CASE("L1 prefetch fills train but never trigger") {
    PrefetchEngine e(nofilter(), TableConfig{});
    e.train({kPc, A, AccessKind::L1PrefetchFill});
    e.train({kPc, B, AccessKind::L1PrefetchFill});
    CHECK(e.table().lookup(A) == std::optional<std::uint64_t>(B));
    CHECK(e.on_demand({kPc, A, AccessKind::L1PrefetchFill}).empty());

    PrefetcherConfig no_fill = nofilter();
    no_fill.train_on_l1_fills = false;
    PrefetchEngine f(no_fill, TableConfig{});
    f.train({kPc, A, AccessKind::L1PrefetchFill});
    f.train({kPc, B, AccessKind::L1PrefetchFill});
    CHECK(f.table().occupancy() == 0);
}

TEST_CASE("self transitions are not trained") {
    PrefetchEngine e(nofilter(), TableConfig{});
    for (auto l : {A, A, A, B}) e.train(demand(kPc, l));
    CHECK(e.table().occupancy() == 1);
    CHECK(e.on_demand(demand(kPc, A)) == std::vector<std::uint64_t>{B});
}

TEST_CASE("zero-capacity table disables the engine") {
    PrefetchEngine e(nofilter(), table_config_for(CacheConfig{}, 0, ReplacementMode::Lru));
    CHECK_FALSE(e.enabled());
    e.train(demand(kPc, A));
    e.train(demand(kPc, B));
    CHECK(e.on_demand(demand(kPc, A)).empty());
}

TEST_CASE("simplified mode pins degree 1 and the 1 MB table") {
    auto cfg = simplified_prefetcher_config();
    cfg.degree = 4;
    PrefetchEngine e(cfg, simplified_table_config(CacheConfig{}, ReplacementMode::Lru));
    CHECK(e.config().degree == 1);
    CHECK(e.config().insertion == InsertionMode::NoFilter);
    TableConfig small;
    small.assoc_entries_per_set = 12;
    CHECK_THROWS_AS(PrefetchEngine(simplified_prefetcher_config(), small), Error);
    CHECK(parse_insertion_mode("patternconf") == InsertionMode::PatternConfBaseline);
    CHECK(parse_training_scope("global") == TrainingScope::Global);
}
