#include <doctest.h>

#include <random>
#include <sstream>

#include "helpers.hpp"
#include "prophet/error.hpp"
#include "prophet/profiler.hpp"
#include "prophet/simulation.hpp"

using namespace prophet;

namespace {

const CacheConfig kSmallLlc{256u << 10, 16, 64, 8};

ProfileOptions small_profile(std::uint64_t period = 1) {
    ProfileOptions o;
    o.cache = kSmallLlc;
    o.sample_period = period;
    return o;
}

Trace noisy_trace(std::uint64_t seed = 1) {
    TraceSpec spec;
    spec.pattern = TracePattern::InterleavedNoise;
    spec.unique_addrs = 6000;
    spec.repetitions = 6;
    spec.noise_ratio = 0.4;
    spec.seed = seed;
    return generate_trace(spec);
}

const PcCounters& counters_for(const CounterFile& cf, std::uint64_t pc) {
    for (const auto& c : cf.pcs)
        if (c.pc == pc) return c;
    FAIL("pc not profiled");
    return cf.pcs.front();
}

}  // namespace

TEST_CASE("a loop that fits the table profiles near-perfect accuracy") {
    auto t = testing::loop_trace(generator_pc::kTemporal, testing::consecutive_lines(6000), 10);
    auto cf = profile(t, small_profile());
    REQUIRE(cf.pcs.size() == 1);
    const auto& c = cf.pcs[0];
    // every issue after warm-up is consumed; only the tail of the last pass is not
    CHECK(c.issued - c.useful <= 1);
    CHECK(c.accuracy() > 0.999);
}

TEST_CASE("uniformly random addresses profile near-zero accuracy") {
    std::mt19937_64 rng(4);
    Trace t;
    for (int i = 0; i < 40000; ++i)
        t.push_back(testing::demand(generator_pc::kNoise, (std::uint64_t{1} << 28) + rng() % (std::uint64_t{1} << 28)));
    auto cf = profile(t, small_profile());
    CHECK(counters_for(cf, generator_pc::kNoise).accuracy() < 0.02);

    // next to a temporal PC the noise stays well below it
    auto mixed = profile(noisy_trace(), small_profile());
    CHECK(counters_for(mixed, generator_pc::kTemporal).accuracy() > 0.5);
    CHECK(counters_for(mixed, generator_pc::kNoise).accuracy() < 0.1);
}

TEST_CASE("allocated entries equal the simplified table occupancy") {
    auto t = noisy_trace(3);
    auto cf = profile(t, small_profile());
    auto sim = Simulator::simplified(kSmallLlc);
    sim.run(t);
    CHECK(cf.app.allocated_entries_end == sim.engine().table().occupancy());
    CHECK(cf.app.allocated_entries_end == sim.engine().table().scan_occupancy());
    CHECK(cf.app.allocated_entries_end == cf.app.insertions - cf.app.replacements);
}

TEST_CASE("exact counters reproduce the engine's accuracy bit for bit") {
    auto t = noisy_trace(5);
    auto cf = profile(t, small_profile());
    auto sim = Simulator::simplified(kSmallLlc);
    sim.run(t);
    for (const auto& c : cf.pcs) {
        CHECK(c.accuracy() == sim.engine().accuracy(c.pc));
        const auto& s = sim.engine().pc_stats().at(c.pc);
        CHECK(c.issued == s.issued);
        CHECK(c.useful == s.useful);
        CHECK(c.demand_misses == s.demand_misses);
    }
}

TEST_CASE("every-kth sampling stays within k-1 events of the exact count") {
    auto t = noisy_trace(7);
    auto exact = profile(t, small_profile(1));
    for (std::uint64_t k : {2, 3, 7, 16, 64}) {
        auto sampled = profile(t, small_profile(k));
        REQUIRE(sampled.pcs.size() == exact.pcs.size());
        for (std::size_t i = 0; i < exact.pcs.size(); ++i) {
            const auto& e = exact.pcs[i];
            const auto& s = sampled.pcs[i];
            CHECK(s.pc == e.pc);
            CHECK(s.demand_misses == e.demand_misses);
            auto diff = [](std::uint64_t a, std::uint64_t b) { return a > b ? a - b : b - a; };
            CHECK(diff(s.issued, e.issued) <= k - 1);
            CHECK(diff(s.useful, e.useful) <= k - 1);
            CHECK(s.useful <= s.issued);
        }
        CHECK(sampled.app == exact.app);
    }
}

TEST_CASE("random sampling is seeded and unbiased enough") {
    auto t = noisy_trace(9);
    auto o = small_profile(8);
    o.sampling = SamplingMode::Random;
    auto a = profile(t, o);
    auto b = profile(t, o);
    CHECK(a == b);
    auto exact = profile(t, small_profile(1));
    const auto& e = counters_for(exact, generator_pc::kTemporal);
    const auto& s = counters_for(a, generator_pc::kTemporal);
    CHECK(std::abs(s.accuracy() - e.accuracy()) < 0.05);
}

TEST_CASE("sample periods 1 and 16 agree on accuracy within 0.05") {
    auto t = noisy_trace(11);
    auto exact = profile(t, small_profile(1));
    auto sampled = profile(t, small_profile(16));
    for (std::size_t i = 0; i < exact.pcs.size(); ++i)
        CHECK(std::abs(exact.pcs[i].accuracy() - sampled.pcs[i].accuracy()) <= 0.05);
}

TEST_CASE("profile is deterministic") {
    auto t = noisy_trace(13);
    CHECK(profile(t, small_profile(4)) == profile(t, small_profile(4)));
}

TEST_CASE("profile rejects empty input and zero periods") {
    Trace empty;
    CHECK_THROWS_AS(profile(empty, small_profile()), Error);
    auto t = noisy_trace();
    CHECK_THROWS_AS(profile(t, small_profile(0)), Error);
}

TEST_CASE("top miss PCs") {
    std::vector<PcCounters> one = {{0x10, 0, 0, 5}};
    CHECK(top_miss_pcs(one) == std::vector<std::uint64_t>{0x10});

    std::vector<PcCounters> three = {{0xA, 0, 0, 10}, {0xB, 0, 0, 30}, {0xC, 0, 0, 30}};
    CHECK(top_miss_pcs(three) == std::vector<std::uint64_t>{0xB, 0xC, 0xA});

    std::vector<PcCounters> many;
    for (std::uint64_t i = 0; i < 200; ++i) many.push_back({i, 0, 0, i % 17});
    auto top = top_miss_pcs(many);
    CHECK(top.size() == 128);
    CHECK(top_miss_pcs(many, 5).size() == 5);
}

TEST_CASE("counter files round-trip") {
    auto cf = profile(noisy_trace(), small_profile(4));
    std::ostringstream out;
    write_counters(out, cf);
    std::istringstream in(out.str());
    CHECK(read_counters(in) == cf);
}

TEST_CASE("malformed counter files") {
    auto kind = [](const std::string& body) {
        std::istringstream in(body);
        try {
            read_counters(in);
        } catch (const Error& e) {
            return e.kind();
        }
        return ErrorKind::Contract;
    };
    CHECK(kind("PRFCNT02\n") == ErrorKind::Format);
    CHECK(kind("PRFCNT01\napp.bogus=1\n") == ErrorKind::Parse);
    CHECK(kind("PRFCNT01\npc=0x1 issued=1 useful=2 misses=0\n") == ErrorKind::Parse);
    CHECK(kind("PRFCNT01\npc=0x1 issued=1 useful=0\n") == ErrorKind::Parse);
    CHECK(kind("PRFCNT01\npc=0x1 issued=1 useful=0 misses=0\npc=0x1 issued=1 useful=0 misses=0\n") ==
          ErrorKind::Parse);
    CHECK(kind("PRFCNT01\n") == ErrorKind::Contract);  // valid and empty
}
