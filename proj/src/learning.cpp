#include "prophet/learning.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "prophet/error.hpp"
#include "text_util.hpp"

namespace prophet {

double merge_pc(std::optional<double> old_value, double new_value, std::uint64_t l,
                std::uint64_t cap_L) {
    if (!old_value) return new_value;
    const auto step = std::min(l + 1, cap_L);
    const double m = *old_value + (new_value - *old_value) / static_cast<double>(step);
    // rounding can overshoot by one ulp
    return std::clamp(m, std::min(*old_value, new_value), std::max(*old_value, new_value));
}

std::uint64_t merge_app(std::uint64_t old_value, std::uint64_t new_value) {
    return std::max(old_value, new_value);
}

CounterStore learn(CounterStore store, const CounterFile& counters) {
    if (store.cap_L < 1) throw Error(ErrorKind::UnsupportedSpec, "cap_L must be >= 1");
    for (const auto& c : counters.pcs) {
        auto it = store.per_pc.find(c.pc);
        if (it == store.per_pc.end()) {
            store.per_pc.emplace(c.pc, StoreRecord{c.accuracy(), c.demand_misses});
            continue;
        }
        auto& rec = it->second;
        rec.accuracy = merge_pc(rec.accuracy, c.accuracy(), store.loop_l, store.cap_L);
        // Miss counts follow the same step so top-k selection adapts too.
        auto merged = merge_pc(static_cast<double>(rec.misses),
                               static_cast<double>(c.demand_misses), store.loop_l, store.cap_L);
        rec.misses = static_cast<std::uint64_t>(std::llround(merged));
    }
    store.allocated = merge_app(store.allocated, counters.app.allocated_entries_end);
    ++store.loop_l;
    return store;
}

CounterStore read_store(std::istream& in) {
    std::string line;
    if (!std::getline(in, line))
        throw Error(ErrorKind::Format, "store file: empty");
    auto header = text::trim(line);
    if (header != kStoreHeader) {
        if (header.starts_with("PRFSTO"))
            throw Error(ErrorKind::Version, "store file: unsupported version '" +
                                                std::string(header) + "', expected PRFSTO01");
        throw Error(ErrorKind::Format, "store file: missing PRFSTO01 header");
    }

    CounterStore s;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        auto body = text::trim(line);
        if (body.empty()) continue;
        auto fail = [&](const std::string& what) {
            return Error(ErrorKind::Parse, "store file: line " + std::to_string(lineno) + ": " + what);
        };
        if (body.starts_with("meta.") || body.starts_with("app.")) {
            auto kv = text::key_value(body);
            auto v = kv ? text::parse_u64(kv->second) : std::nullopt;
            if (!v) throw fail("expected <field>=<count>");
            if (kv->first == "meta.loop_l")
                s.loop_l = *v;
            else if (kv->first == "meta.cap_L")
                s.cap_L = *v;
            else if (kv->first == "app.allocated")
                s.allocated = *v;
            else
                throw fail("unknown field '" + std::string(kv->first) + "'");
            continue;
        }
        std::optional<std::uint64_t> pc, misses;
        std::optional<double> acc;
        for (auto tok : text::tokens(body)) {
            auto kv = text::key_value(tok);
            if (!kv) throw fail("expected key=value tokens");
            if (kv->first == "pc")
                pc = text::parse_hex(kv->second);
            else if (kv->first == "acc")
                acc = text::parse_double(kv->second);
            else if (kv->first == "misses")
                misses = text::parse_u64(kv->second);
            else
                throw fail("unexpected token '" + std::string(tok) + "'");
        }
        if (!pc || !acc || !misses) throw fail("pc line needs pc, acc and misses");
        if (!(*acc >= 0.0 && *acc <= 1.0)) throw fail("acc outside [0,1]");
        if (!s.per_pc.emplace(*pc, StoreRecord{*acc, *misses}).second)
            throw fail("duplicate pc " + text::hex(*pc));
    }
    if (s.cap_L < 1) throw Error(ErrorKind::Parse, "store file: meta.cap_L must be >= 1");
    return s;
}

CounterStore load_store(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
    try {
        return read_store(in);
    } catch (const Error& e) {
        throw Error(e.kind(), path.string() + ": " + e.what());
    }
}

void write_store(std::ostream& out, const CounterStore& s) {
    out << kStoreHeader << '\n';
    out << "meta.loop_l=" << s.loop_l << '\n';
    out << "meta.cap_L=" << s.cap_L << '\n';
    out << "app.allocated=" << s.allocated << '\n';
    char acc[32];
    for (const auto& [pc, rec] : s.per_pc) {
        std::snprintf(acc, sizeof acc, "%.9f", rec.accuracy);
        out << "pc=" << text::hex(pc) << " acc=" << acc << " misses=" << rec.misses << '\n';
    }
}

void save_store(const std::filesystem::path& path, const CounterStore& s) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
    write_store(out, s);
}

}  // namespace prophet
