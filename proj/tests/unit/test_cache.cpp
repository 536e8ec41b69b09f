#include <doctest.h>

#include <algorithm>
#include <list>
#include <optional>
#include <random>

#include "prophet/cache.hpp"
#include "prophet/error.hpp"

using namespace prophet;

namespace {

CacheConfig one_set(std::uint32_t ways) { return {std::uint64_t{ways} * 64, ways, 64, 0}; }

// Reference model of one fully associative set: front = most recent.
struct RefSet {
    struct Line {
        std::uint64_t addr;
        bool prefetched;
        std::uint64_t pc;
    };
    std::size_t ways;
    std::list<Line> lines;

    std::list<Line>::iterator find(std::uint64_t a) {
        return std::find_if(lines.begin(), lines.end(), [&](const Line& l) { return l.addr == a; });
    }
    void install(Line l) {
        if (lines.size() == ways) lines.pop_back();
        lines.push_front(l);
    }
    DemandResult demand(std::uint64_t a) {
        auto it = find(a);
        if (it == lines.end()) {
            install({a, false, 0});
            return {DemandOutcome::Miss, std::nullopt};
        }
        Line l = *it;
        lines.erase(it);
        DemandResult r{DemandOutcome::Hit, std::nullopt};
        if (l.prefetched) r = {DemandOutcome::HitOnPrefetch, l.pc};
        l.prefetched = false;
        lines.push_front(l);
        return r;
    }
    FillResult fill(std::uint64_t a, std::uint64_t pc) {
        if (find(a) != lines.end()) return FillResult::AlreadyPresent;
        install({a, true, pc});
        return FillResult::Inserted;
    }
};

}  // namespace

TEST_CASE("cold access misses") {
    LlcCache c(CacheConfig{});
    CHECK(c.demand_access(0x1234).outcome == DemandOutcome::Miss);
}

TEST_CASE("prefetched line reports its issuing pc once") {
    LlcCache c(CacheConfig{});
    CHECK(c.prefetch_fill(0x40, 0x400a10) == FillResult::Inserted);
    auto r = c.demand_access(0x40);
    CHECK(r.outcome == DemandOutcome::HitOnPrefetch);
    CHECK(r.issuing_pc == std::optional<std::uint64_t>(0x400a10));
    auto r2 = c.demand_access(0x40);
    CHECK(r2.outcome == DemandOutcome::Hit);
    CHECK_FALSE(r2.issuing_pc.has_value());
}

TEST_CASE("second fill of the same line is redundant") {
    LlcCache c(CacheConfig{});
    CHECK(c.prefetch_fill(7, 1) == FillResult::Inserted);
    CHECK(c.prefetch_fill(7, 2) == FillResult::AlreadyPresent);
    CHECK(c.stats().redundant_fills == 1);
    // the first issuer keeps the credit
    CHECK(c.demand_access(7).issuing_pc == std::optional<std::uint64_t>(1));
}

TEST_CASE("prefetched line evicted before use later misses") {
    LlcCache c(one_set(2));
    c.prefetch_fill(100, 9);
    c.demand_access(1);
    c.demand_access(2);
    CHECK_FALSE(c.contains(100));
    CHECK(c.demand_access(100).outcome == DemandOutcome::Miss);
}

TEST_CASE("single set replays identically against a reference LRU model") {
    for (std::uint32_t ways : {1u, 2u, 4u, 8u}) {
        std::mt19937_64 rng(ways);
        LlcCache c(one_set(ways));
        RefSet ref{ways, {}};
        for (int i = 0; i < 20000; ++i) {
            auto addr = rng() % (ways * 3);
            if (rng() % 3 == 0) {
                auto pc = rng() % 5;
                REQUIRE(c.prefetch_fill(addr, pc) == ref.fill(addr, pc));
            } else {
                auto got = c.demand_access(addr);
                auto want = ref.demand(addr);
                REQUIRE(got.outcome == want.outcome);
                REQUIRE(got.issuing_pc == want.issuing_pc);
            }
        }
    }
}

TEST_CASE("partition sizes") {
    CacheConfig cfg;  // 2 MB, 16-way
    LlcCache c(cfg);
    c.set_partition(8);
    CHECK(c.sets() == 2048);
    CHECK(c.data_ways() == 8);
    CHECK(c.metadata_entry_capacity() == 2048u * 8 * 12);
    CHECK(c.metadata_entry_capacity() == 196608);
    CHECK(c.data_capacity_lines() == 2048u * 8);

    LlcCache none(cfg);
    none.set_partition(0);
    CHECK(none.metadata_entry_capacity() == 0);
    CHECK(none.data_ways() == 16);

    LlcCache all(cfg);
    all.set_partition(16);
    CHECK(all.data_ways() == 0);
    CHECK(all.demand_access(1).outcome == DemandOutcome::Miss);
    CHECK(all.demand_access(1).outcome == DemandOutcome::Miss);
    CHECK(all.prefetch_fill(2, 1) == FillResult::AlreadyPresent);
}

TEST_CASE("partition changes are start-of-run only") {
    LlcCache c(CacheConfig{});
    c.set_partition(4);
    c.set_partition(6);
    c.demand_access(1);
    try {
        c.set_partition(8);
        FAIL("expected a usage error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Usage);
    }
    LlcCache d(CacheConfig{});
    CHECK_THROWS_AS(d.set_partition(17), Error);
}

TEST_CASE("cache geometry validation") {
    CHECK_THROWS_AS(validate(CacheConfig{3u << 20, 16, 64, 0}), Error);
    CHECK_THROWS_AS(validate(CacheConfig{2u << 20, 16, 128, 0}), Error);
    CHECK_THROWS_AS(validate(CacheConfig{2u << 20, 16, 64, 17}), Error);
    CHECK_NOTHROW(validate(CacheConfig{256u << 10, 16, 64, 8}));
}

TEST_CASE("hits plus misses equal demand accesses and LRU evicts the oldest") {
    CacheConfig cfg{64 * 4 * 8, 4, 64, 0};  // 8 sets x 4 ways
    LlcCache c(cfg);
    c.set_partition(1);
    std::mt19937_64 rng(3);
    for (int i = 0; i < 50000; ++i) {
        auto addr = rng() % 96;
        auto set = addr & 7;
        auto before = c.set_contents(set);
        bool present = c.contains(addr);
        if (rng() % 4 == 0)
            c.prefetch_fill(addr, 1);
        else
            c.demand_access(addr);
        if (present) continue;
        auto after = c.set_contents(set);
        REQUIRE(after.size() == 3);
        bool full = std::all_of(before.begin(), before.end(), [](auto& l) { return l.valid; });
        if (!full) continue;
        // exactly the line with the smallest stamp disappeared
        auto oldest = std::min_element(before.begin(), before.end(), [](auto& a, auto& b) {
            return a.lru_stamp < b.lru_stamp;
        });
        bool gone = std::none_of(after.begin(), after.end(),
                                 [&](auto& l) { return l.valid && l.tag == oldest->tag; });
        REQUIRE(gone);
    }
    const auto& s = c.stats();
    CHECK(s.hits + s.misses == s.demand_accesses);
}

TEST_CASE("untracked fills are ordinary lines") {
    LlcCache c(CacheConfig{});
    c.untracked_fill(5);
    CHECK(c.stats().demand_accesses == 0);
    CHECK(c.demand_access(5).outcome == DemandOutcome::Hit);
}
