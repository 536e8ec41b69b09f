#include "prophet/profiler.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <string>
#include <unordered_set>

#include "prophet/error.hpp"
#include "prophet/simulation.hpp"
#include "text_util.hpp"

namespace prophet {

namespace {

// PEBS-style sampler for one event kind.
class EventSampler {
public:
    EventSampler(std::uint64_t period, SamplingMode mode, std::uint64_t seed)
        : period_(period), mode_(mode), rng_(seed) {}

    void observe(std::uint64_t pc) {
        if (period_ == 1) {
            ++scaled_[pc];
            return;
        }
        bool take = false;
        if (mode_ == SamplingMode::EveryKth) {
            take = ++phase_[pc] % period_ == 0;
        } else {
            take = std::uniform_int_distribution<std::uint64_t>(0, period_ - 1)(rng_) == 0;
        }
        if (take) scaled_[pc] += period_;
    }

    std::uint64_t scaled(std::uint64_t pc) const {
        auto it = scaled_.find(pc);
        return it == scaled_.end() ? 0 : it->second;
    }

private:
    std::uint64_t period_;
    SamplingMode mode_;
    std::mt19937_64 rng_;
    std::map<std::uint64_t, std::uint64_t> phase_;
    std::map<std::uint64_t, std::uint64_t> scaled_;
};

}  // namespace

CounterFile profile(std::span<const MemoryAccess> trace, const ProfileOptions& options) {
    if (trace.empty()) throw Error(ErrorKind::Usage, "profile needs a non-empty trace");
    if (options.sample_period < 1) throw Error(ErrorKind::Usage, "sample period must be >= 1");

    auto sim = Simulator::simplified(options.cache);
    EventSampler issued(options.sample_period, options.sampling, options.seed);
    EventSampler useful(options.sample_period, options.sampling, options.seed ^ 0x9e3779b97f4a7c15ULL);
    sim.set_event_hook([&](EventKind kind, std::uint64_t pc) {
        if (kind == EventKind::PrefetchIssued)
            issued.observe(pc);
        else if (kind == EventKind::PrefetchUseful)
            useful.observe(pc);
    });
    sim.run(trace);

    CounterFile out;
    for (const auto& [pc, stats] : sim.engine().pc_stats()) {
        PcCounters c;
        c.pc = pc;
        c.issued = issued.scaled(pc);
        c.useful = std::min(useful.scaled(pc), c.issued);
        c.demand_misses = stats.demand_misses;
        out.pcs.push_back(c);
    }
    const auto& table = sim.engine().table();
    out.app.insertions = table.insertions();
    out.app.replacements = table.replacements();
    out.app.allocated_entries_end = table.occupancy();
    out.app.loop_index_l = 0;
    return out;
}

std::vector<std::uint64_t> top_miss_pcs(std::span<const PcCounters> counters, std::size_t k) {
    std::vector<const PcCounters*> order;
    order.reserve(counters.size());
    for (const auto& c : counters) order.push_back(&c);
    std::sort(order.begin(), order.end(), [](const PcCounters* a, const PcCounters* b) {
        if (a->demand_misses != b->demand_misses) return a->demand_misses > b->demand_misses;
        return a->pc < b->pc;
    });
    std::vector<std::uint64_t> out;
    for (std::size_t i = 0; i < order.size() && i < k; ++i) out.push_back(order[i]->pc);
    return out;
}

CounterFile read_counters(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || text::trim(line) != kCounterHeader)
        throw Error(ErrorKind::Format, "counter file: missing PRFCNT01 header");

    CounterFile cf;
    std::unordered_set<std::uint64_t> seen;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        auto body = text::trim(line);
        if (body.empty()) continue;
        auto fail = [&](const std::string& what) {
            return Error(ErrorKind::Parse,
                         "counter file: line " + std::to_string(lineno) + ": " + what);
        };
        if (body.starts_with("app.")) {
            auto kv = text::key_value(body.substr(4));
            auto v = kv ? text::parse_u64(kv->second) : std::nullopt;
            if (!v) throw fail("expected app.<field>=<count>");
            auto field = kv->first;
            if (field == "insertions")
                cf.app.insertions = *v;
            else if (field == "replacements")
                cf.app.replacements = *v;
            else if (field == "allocated_end")
                cf.app.allocated_entries_end = *v;
            else if (field == "loop_l")
                cf.app.loop_index_l = *v;
            else
                throw fail("unknown app field '" + std::string(field) + "'");
            continue;
        }
        PcCounters c;
        bool has_pc = false, has_issued = false, has_useful = false, has_misses = false;
        for (auto tok : text::tokens(body)) {
            auto kv = text::key_value(tok);
            if (!kv) throw fail("expected key=value tokens");
            auto [k, v] = *kv;
            std::optional<std::uint64_t> n;
            if (k == "pc") {
                n = text::parse_hex(v);
                has_pc = n.has_value();
                if (n) c.pc = *n;
            } else if (k == "issued") {
                n = text::parse_u64(v);
                has_issued = n.has_value();
                if (n) c.issued = *n;
            } else if (k == "useful") {
                n = text::parse_u64(v);
                has_useful = n.has_value();
                if (n) c.useful = *n;
            } else if (k == "misses") {
                n = text::parse_u64(v);
                has_misses = n.has_value();
                if (n) c.demand_misses = *n;
            } else {
                throw fail("unexpected token '" + std::string(tok) + "'");
            }
            if (!n) throw fail("bad value in '" + std::string(tok) + "'");
        }
        if (!(has_pc && has_issued && has_useful && has_misses))
            throw fail("pc line needs pc, issued, useful and misses");
        if (c.useful > c.issued) throw fail("useful exceeds issued");
        if (!seen.insert(c.pc).second) throw fail("duplicate pc " + text::hex(c.pc));
        cf.pcs.push_back(c);
    }
    std::sort(cf.pcs.begin(), cf.pcs.end(),
              [](const PcCounters& a, const PcCounters& b) { return a.pc < b.pc; });
    return cf;
}

CounterFile load_counters(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
    try {
        return read_counters(in);
    } catch (const Error& e) {
        throw Error(e.kind(), path.string() + ": " + e.what());
    }
}

void write_counters(std::ostream& out, const CounterFile& cf) {
    out << kCounterHeader << '\n';
    out << "app.insertions=" << cf.app.insertions << '\n';
    out << "app.replacements=" << cf.app.replacements << '\n';
    out << "app.allocated_end=" << cf.app.allocated_entries_end << '\n';
    out << "app.loop_l=" << cf.app.loop_index_l << '\n';
    for (const auto& c : cf.pcs)
        out << "pc=" << text::hex(c.pc) << " issued=" << c.issued << " useful=" << c.useful
            << " misses=" << c.demand_misses << '\n';
}

void save_counters(const std::filesystem::path& path, const CounterFile& cf) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
    write_counters(out, cf);
}

}  // namespace prophet
