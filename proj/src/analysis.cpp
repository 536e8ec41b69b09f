#include "prophet/analysis.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "prophet/error.hpp"
#include "prophet/learning.hpp"

namespace prophet {

void validate(const AnalysisParams& p) {
    if (p.n < 1 || p.n > 2)
        throw Error(ErrorKind::UnsupportedSpec, "priority width n must be 1 or 2 (2-bit hints)");
    const double first_band = 1.0 / static_cast<double>(1u << p.n);
    if (!(p.el_acc > 0.0 && p.el_acc < first_band))
        throw Error(ErrorKind::UnsupportedSpec,
                    "el_acc must lie in (0, 1/2^n) = (0, " + std::to_string(first_band) + ")");
    if (p.llc_sets == 0) throw Error(ErrorKind::UnsupportedSpec, "llc_sets must be positive");
    if (p.entries_per_line == 0) throw Error(ErrorKind::UnsupportedSpec, "entries_per_line must be positive");
}

bool insert_decision(double acc, const AnalysisParams& params) { return acc >= params.el_acc; }

unsigned priority_level(double acc, const AnalysisParams& params) {
    if (acc < params.el_acc)
        throw Error(ErrorKind::Contract, "priority_level called with acc below el_acc");
    const unsigned levels = 1u << params.n;
    const double band = std::floor(acc * static_cast<double>(levels));
    if (band >= static_cast<double>(levels - 1)) return levels - 1;
    return static_cast<unsigned>(band);
}

std::uint64_t nearest_power_of_two(std::uint64_t value) {
    if (value == 0) return 0;
    const auto lower = std::bit_floor(value);
    if (value == lower || lower == (std::uint64_t{1} << 63)) return lower;
    const auto upper = lower << 1;
    return (value - lower) < (upper - value) ? lower : upper;
}

ResizeDecision resize_decision(std::uint64_t allocated_entries, const AnalysisParams& params) {
    ResizeDecision d;
    const auto cap = std::bit_floor(params.max_table_entries());
    d.target_entries = std::min(nearest_power_of_two(allocated_entries), cap);
    d.target_lines = (d.target_entries + params.entries_per_line - 1) / params.entries_per_line;
    d.raw_ways = static_cast<double>(d.target_lines) / static_cast<double>(params.llc_sets);
    // raw < 0.5, in integers.
    if (2 * d.target_lines < params.llc_sets) {
        d.prefetcher_enabled = false;
        d.metadata_ways = 0;
        return d;
    }
    d.prefetcher_enabled = true;
    d.metadata_ways =
        static_cast<std::uint32_t>((d.target_lines + params.llc_sets - 1) / params.llc_sets);
    return d;
}

AnalysisInput analysis_input(const CounterFile& counters) {
    AnalysisInput in;
    in.allocated_entries = counters.app.allocated_entries_end;
    for (const auto& c : counters.pcs) in.pcs.push_back({c.pc, c.accuracy(), c.demand_misses});
    return in;
}

AnalysisInput analysis_input(const CounterStore& store) {
    AnalysisInput in;
    in.allocated_entries = store.allocated;
    for (const auto& [pc, rec] : store.per_pc) in.pcs.push_back({pc, rec.accuracy, rec.misses});
    return in;
}

HintManifest analyze(const AnalysisInput& input, const AnalysisParams& params) {
    validate(params);

    std::vector<AnalysisRecord> ranked = input.pcs;
    std::sort(ranked.begin(), ranked.end(), [](const AnalysisRecord& a, const AnalysisRecord& b) {
        if (a.misses != b.misses) return a.misses > b.misses;
        return a.pc < b.pc;
    });
    if (ranked.size() > params.top_k) ranked.resize(params.top_k);

    HintManifest m;
    auto resize = resize_decision(input.allocated_entries, params);
    m.csr.prophet_enabled = true;
    m.csr.metadata_ways = resize.metadata_ways;
    m.csr.insertion_policy_enabled = false;
    m.csr.resizing_from_profile = true;

    for (const auto& r : ranked) {
        HintEntry e;
        e.pc = r.pc;
        e.hint.insert = insert_decision(r.accuracy, params);
        e.hint.priority =
            e.hint.insert ? static_cast<std::uint8_t>(priority_level(r.accuracy, params)) : 0;
        m.hints.push_back(e);
    }
    return m;
}

}  // namespace prophet
