#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "prophet/analysis.hpp"
#include "prophet/learning.hpp"
#include "prophet/profiler.hpp"
#include "prophet/simulation.hpp"
#include "prophet/trace.hpp"

namespace prophet {

/// Everything a pipeline run can be configured with. Loaded from key=value
/// text; keys are grouped as cache.*, pf.*, analysis.*, learn.*, trace.*,
/// profile.* and sim.*, plus a global `seed`.
struct RunConfig {
    TraceSpec trace;
    SimConfig sim;
    AnalysisParams analysis;
    ProfileOptions profile;
    std::uint64_t cap_L = kDefaultCapL;

    /// Throws Error{Usage} for an unknown key and Error{Parse} for a bad value.
    void set(const std::string& key, const std::string& value);

    void set_seed(std::uint64_t seed);

    /// Analysis and profiling follow the simulated LLC unless
    /// analysis.llc_sets was given explicitly.
    AnalysisParams effective_analysis() const;
    ProfileOptions effective_profile() const;

private:
    std::optional<std::uint64_t> llc_sets_override_;
};

RunConfig read_run_config(std::istream& in);
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace prophet
