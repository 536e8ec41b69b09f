#include <doctest.h>

#include <sstream>

#include "prophet/config.hpp"
#include "prophet/error.hpp"

using namespace prophet;

TEST_CASE("config keys reach their fields") {
    std::istringstream in(
        "# comment\n"
        "seed=9\n"
        "cache.total_size=262144\n"
        "cache.ways=16\n"
        "cache.metadata_ways=4\n"
        "pf.degree=3\n"
        "pf.replacement=srrip\n"
        "pf.victim_buffer=0\n"
        "pf.vb_candidates=2\n"
        "pf.training_scope=global\n"
        "analysis.el_acc=0.05\n"
        "analysis.n=1\n"
        "learn.cap_L=4\n"
        "trace.pattern=multi_target\n"
        "trace.unique_addrs=123\n"
        "trace.fanout=1:0.5,2:0.5\n"
        "profile.sample_period=16\n"
        "profile.sampling=random\n"
        "sim.policy=patternconf\n"
        "sim.run_id=abc\n");
    auto c = read_run_config(in);
    CHECK(c.trace.seed == 9);
    CHECK(c.sim.seed == 9);
    CHECK(c.profile.seed == 9);
    CHECK(c.sim.cache.sets() == 256);
    CHECK(c.sim.cache.metadata_ways == 4);
    CHECK(c.sim.prefetcher.degree == 3);
    CHECK(c.sim.prefetcher.replacement == ReplacementMode::Srrip);
    CHECK_FALSE(c.sim.prefetcher.victim_buffer_enabled);
    CHECK(c.sim.prefetcher.victim_buffer.candidates_per_entry == 2);
    CHECK(c.sim.prefetcher.scope == TrainingScope::Global);
    CHECK(c.analysis.el_acc == 0.05);
    CHECK(c.analysis.n == 1);
    CHECK(c.cap_L == 4);
    CHECK(c.trace.pattern == TracePattern::MultiTarget);
    CHECK(c.trace.unique_addrs == 123);
    CHECK(c.trace.target_fanout_dist.size() == 2);
    CHECK(c.profile.sample_period == 16);
    CHECK(c.profile.sampling == SamplingMode::Random);
    CHECK(c.sim.policy == Policy::PatternConf);
    CHECK(c.sim.run_id == "abc");

    // analysis and profiling follow the simulated LLC
    CHECK(c.effective_analysis().llc_sets == 256);
    CHECK(c.effective_profile().cache.total_size == 262144);
    c.set("analysis.llc_sets", "2048");
    CHECK(c.effective_analysis().llc_sets == 2048);
}

TEST_CASE("config errors") {
    RunConfig c;
    try {
        c.set("nope", "1");
        FAIL("expected usage error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Usage);
    }
    try {
        c.set("pf.degree", "many");
        FAIL("expected parse error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Parse);
    }
    std::istringstream in("seed\n");
    CHECK_THROWS_AS(read_run_config(in), Error);
    CHECK_THROWS_AS(load_run_config("/nonexistent/prophet.cfg"), Error);
}
