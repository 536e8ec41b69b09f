#include "prophet/trace.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "prophet/error.hpp"
#include "text_util.hpp"

namespace prophet {

namespace {

constexpr std::uint64_t kLineAddrLimit = std::uint64_t{1} << kLineAddrBits;

void put_le64(char* out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out[i] = static_cast<char>((v >> (8 * i)) & 0xff);
}

std::uint64_t get_le64(const unsigned char* in) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | in[i];
    return v;
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
    return in;
}

}  // namespace

Trace read_binary_trace(std::istream& in) {
    std::array<char, 8> magic{};
    in.read(magic.data(), magic.size());
    if (in.gcount() != 8 || std::string_view(magic.data(), 8) != kBinaryTraceMagic)
        throw Error(ErrorKind::Format, "binary trace: bad magic, expected PRFTRC01");

    Trace trace;
    std::array<unsigned char, kBinaryRecordBytes> rec{};
    std::uint64_t offset = 8;
    while (true) {
        in.read(reinterpret_cast<char*>(rec.data()), rec.size());
        auto got = static_cast<std::size_t>(in.gcount());
        if (got == 0) break;
        if (got != rec.size())
            throw Error(ErrorKind::Parse, "binary trace: truncated record at byte offset " +
                                              std::to_string(offset));
        MemoryAccess a;
        a.pc = get_le64(rec.data());
        a.line_addr = get_le64(rec.data() + 8);
        if (a.line_addr >= kLineAddrLimit)
            throw Error(ErrorKind::Parse, "binary trace: line address exceeds 58 bits at byte offset " +
                                              std::to_string(offset + 8));
        if (rec[16] > 1)
            throw Error(ErrorKind::Parse, "binary trace: bad kind byte at byte offset " +
                                              std::to_string(offset + 16));
        a.kind = static_cast<AccessKind>(rec[16]);
        trace.push_back(a);
        offset += rec.size();
    }
    return trace;
}

Trace read_text_trace(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || text::trim(line) != kTextTraceHeader)
        throw Error(ErrorKind::Format, "text trace: missing header \"pc,line_addr,kind\"");

    Trace trace;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        auto body = text::trim(line);
        if (body.empty()) continue;
        auto fields = text::split(body, ',');
        auto fail = [&](const char* what) {
            return Error(ErrorKind::Parse,
                         "text trace: line " + std::to_string(lineno) + ": " + what);
        };
        if (fields.size() != 3) throw fail("expected 3 fields");
        auto pc = text::parse_hex(text::trim(fields[0]));
        auto addr = text::parse_hex(text::trim(fields[1]));
        if (!pc) throw fail("bad pc");
        if (!addr || *addr >= kLineAddrLimit) throw fail("bad line address");
        auto kind = text::trim(fields[2]);
        MemoryAccess a{*pc, *addr, AccessKind::Demand};
        if (kind == "D")
            a.kind = AccessKind::Demand;
        else if (kind == "P")
            a.kind = AccessKind::L1PrefetchFill;
        else
            throw fail("kind must be D or P");
        trace.push_back(a);
    }
    return trace;
}

void write_binary_trace(std::ostream& out, std::span<const MemoryAccess> trace) {
    out.write(kBinaryTraceMagic, 8);
    std::array<char, kBinaryRecordBytes> rec{};
    for (const auto& a : trace) {
        put_le64(rec.data(), a.pc);
        put_le64(rec.data() + 8, a.line_addr);
        rec[16] = static_cast<char>(a.kind);
        out.write(rec.data(), rec.size());
    }
}

void write_text_trace(std::ostream& out, std::span<const MemoryAccess> trace) {
    out << kTextTraceHeader << '\n';
    for (const auto& a : trace) {
        out << text::hex(a.pc) << ',' << text::hex(a.line_addr) << ','
            << (a.kind == AccessKind::Demand ? 'D' : 'P') << '\n';
    }
}

Trace load_trace(const std::filesystem::path& path, TraceFormat format) {
    auto in = open_input(path);
    try {
        return format == TraceFormat::Binary ? read_binary_trace(in) : read_text_trace(in);
    } catch (const Error& e) {
        throw Error(e.kind(), path.string() + ": " + e.what());
    }
}

TraceFormat detect_trace_format(const std::filesystem::path& path) {
    auto in = open_input(path);
    std::array<char, 8> magic{};
    in.read(magic.data(), magic.size());
    if (in.gcount() == 8 && std::string_view(magic.data(), 8) == kBinaryTraceMagic)
        return TraceFormat::Binary;
    return TraceFormat::Text;
}

void write_trace(const std::filesystem::path& path, std::span<const MemoryAccess> trace,
                 TraceFormat format) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
    if (format == TraceFormat::Binary)
        write_binary_trace(out, trace);
    else
        write_text_trace(out, trace);
    if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

// ---------------------------------------------------------------------------

std::vector<FanoutProbability> default_fanout_distribution() {
    return {{1, 0.5485}, {2, 0.2088}, {3, 0.0971}, {4, 1.0 - 0.5485 - 0.2088 - 0.0971}};
}

void validate(const TraceSpec& spec) {
    auto bad = [](const std::string& what) { return Error(ErrorKind::UnsupportedSpec, what); };
    if (spec.unique_addrs < 1) throw bad("unique_addrs must be >= 1");
    if (spec.repetitions < 1) throw bad("repetitions must be >= 1");
    if (!(spec.noise_ratio >= 0.0 && spec.noise_ratio <= 1.0))
        throw bad("noise_ratio must lie in [0,1]");
    if (spec.target_fanout_dist.empty()) throw bad("empty fanout distribution");
    double sum = 0.0;
    for (const auto& [fanout, p] : spec.target_fanout_dist) {
        if (fanout < 1) throw bad("fanout must be >= 1");
        if (fanout > kMaxGeneratorFanout)
            throw bad("fanout " + std::to_string(fanout) + " exceeds generator cap of 4");
        if (!(p >= 0.0)) throw bad("negative fanout probability");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw bad("fanout probabilities must sum to 1");
    if (spec.unique_addrs > kSyntheticHeapLines / 4) throw bad("unique_addrs too large");
}

namespace {

using Rng = std::mt19937_64;

std::uint64_t draw_below(Rng& rng, std::uint64_t n) {
    return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(rng);
}

std::uint64_t random_heap_line(Rng& rng) {
    return kSyntheticHeapBase + draw_below(rng, kSyntheticHeapLines);
}

std::vector<std::uint64_t> distinct_lines(Rng& rng, std::uint64_t count) {
    std::vector<std::uint64_t> out;
    out.reserve(count);
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(count * 2);
    while (out.size() < count) {
        auto line = random_heap_line(rng);
        if (seen.insert(line).second) out.push_back(line);
    }
    return out;
}

Trace temporal_loop(Rng& rng, const TraceSpec& spec, std::uint64_t pc) {
    auto lines = distinct_lines(rng, spec.unique_addrs);
    Trace t;
    t.reserve(spec.unique_addrs * spec.repetitions);
    for (std::uint64_t r = 0; r < spec.repetitions; ++r)
        for (auto line : lines) t.push_back({pc, line, AccessKind::Demand});
    return t;
}

std::uint64_t noise_count(std::uint64_t temporal, double ratio) {
    if (ratio >= 1.0)
        throw Error(ErrorKind::UnsupportedSpec, "noise_ratio 1 leaves no temporal accesses");
    return static_cast<std::uint64_t>(
        std::llround(static_cast<double>(temporal) * ratio / (1.0 - ratio)));
}

// Shuffles `noise` uniformly random accesses into `base`, preserving base order.
Trace interleave_noise(Rng& rng, const Trace& base, std::uint64_t noise) {
    std::vector<bool> is_noise(base.size() + noise, false);
    std::fill(is_noise.begin(), is_noise.begin() + static_cast<std::ptrdiff_t>(noise), true);
    std::shuffle(is_noise.begin(), is_noise.end(), rng);
    Trace out;
    out.reserve(is_noise.size());
    std::size_t next = 0;
    for (bool n : is_noise) {
        if (n)
            out.push_back({generator_pc::kNoise, random_heap_line(rng), AccessKind::Demand});
        else
            out.push_back(base[next++]);
    }
    return out;
}

// Largest-remainder apportionment of n addresses over the distribution.
std::vector<unsigned> apportion_fanouts(const std::vector<FanoutProbability>& dist,
                                        std::uint64_t n) {
    std::vector<std::uint64_t> counts(dist.size());
    std::vector<std::pair<double, std::size_t>> remainders;
    std::uint64_t assigned = 0;
    for (std::size_t i = 0; i < dist.size(); ++i) {
        double exact = dist[i].probability * static_cast<double>(n);
        counts[i] = static_cast<std::uint64_t>(std::floor(exact));
        assigned += counts[i];
        remainders.emplace_back(exact - std::floor(exact), i);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t k = 0; assigned < n; ++k, ++assigned)
        ++counts[remainders[k % remainders.size()].second];

    std::vector<unsigned> fanouts;
    fanouts.reserve(n);
    for (std::size_t i = 0; i < dist.size(); ++i)
        fanouts.insert(fanouts.end(), counts[i], dist[i].fanout);
    return fanouts;
}

// Builds a balanced digraph in which node i has exactly fanouts[i] distinct
// successors (a Hamiltonian base cycle plus extra edges), then returns an
// Eulerian circuit over it. Repeating the circuit realises every edge and no
// other transition.
std::vector<std::uint32_t> multi_target_circuit(Rng& rng, std::vector<unsigned> fanouts) {
    const auto n = static_cast<std::uint32_t>(fanouts.size());
    std::shuffle(fanouts.begin(), fanouts.end(), rng);

    std::vector<std::uint32_t> outs;
    for (std::uint32_t i = 0; i < n; ++i) outs.insert(outs.end(), fanouts[i] - 1, i);
    std::vector<std::uint32_t> ins = outs;
    std::shuffle(ins.begin(), ins.end(), rng);

    auto edge_key = [](std::uint32_t a, std::uint32_t b) {
        return (static_cast<std::uint64_t>(a) << 32) | b;
    };
    auto legal = [&](std::uint32_t a, std::uint32_t b) { return a != b && b != (a + 1) % n; };
    std::unordered_map<std::uint64_t, int> edges;
    for (std::size_t j = 0; j < outs.size(); ++j) ++edges[edge_key(outs[j], ins[j])];

    auto bad_at = [&](std::size_t j) {
        return !legal(outs[j], ins[j]) || edges[edge_key(outs[j], ins[j])] > 1;
    };
    for (int pass = 0;; ++pass) {
        bool clean = true;
        for (std::size_t j = 0; j < outs.size(); ++j) {
            if (!bad_at(j)) continue;
            clean = false;
            for (int attempt = 0; attempt < 64; ++attempt) {
                auto k = static_cast<std::size_t>(draw_below(rng, outs.size()));
                if (k == j) continue;
                auto nj = edge_key(outs[j], ins[k]);
                auto nk = edge_key(outs[k], ins[j]);
                if (!legal(outs[j], ins[k]) || !legal(outs[k], ins[j]) || nj == nk) continue;
                if (edges[nj] > 0 || edges[nk] > 0) continue;
                --edges[edge_key(outs[j], ins[j])];
                --edges[edge_key(outs[k], ins[k])];
                std::swap(ins[j], ins[k]);
                ++edges[nj];
                ++edges[nk];
                break;
            }
        }
        if (clean) break;
        if (pass > 256)
            throw Error(ErrorKind::UnsupportedSpec,
                        "cannot realise fanout distribution over so few addresses");
    }

    std::vector<std::vector<std::uint32_t>> adj(n);
    for (std::uint32_t i = 0; i < n; ++i) adj[i].push_back((i + 1) % n);
    for (std::size_t j = 0; j < outs.size(); ++j) adj[outs[j]].push_back(ins[j]);
    // Randomise which successor each visit takes first.
    for (auto& succ : adj) std::shuffle(succ.begin(), succ.end(), rng);

    // Hierholzer, iterative.
    std::vector<std::size_t> cursor(n, 0);
    std::vector<std::uint32_t> stack{0};
    std::vector<std::uint32_t> circuit;
    while (!stack.empty()) {
        auto v = stack.back();
        if (cursor[v] < adj[v].size()) {
            stack.push_back(adj[v][cursor[v]++]);
        } else {
            circuit.push_back(v);
            stack.pop_back();
        }
    }
    std::reverse(circuit.begin(), circuit.end());
    circuit.pop_back();  // closing vertex repeats the start
    return circuit;
}

Trace multi_target(Rng& rng, const TraceSpec& spec) {
    unsigned max_fanout = 1;
    for (const auto& f : spec.target_fanout_dist)
        if (f.probability > 0) max_fanout = std::max(max_fanout, f.fanout);
    if (max_fanout > 1 && spec.unique_addrs <= max_fanout)
        throw Error(ErrorKind::UnsupportedSpec,
                    "MultiTarget needs more addresses than its largest fanout");

    auto lines = distinct_lines(rng, spec.unique_addrs);
    auto circuit = multi_target_circuit(rng, apportion_fanouts(spec.target_fanout_dist,
                                                               spec.unique_addrs));
    Trace t;
    t.reserve(circuit.size() * spec.repetitions);
    for (std::uint64_t r = 0; r < spec.repetitions; ++r)
        for (auto v : circuit) t.push_back({generator_pc::kMultiTarget, lines[v], AccessKind::Demand});
    return t;
}

Trace pointer_chase(Rng& rng, const TraceSpec& spec) {
    auto lines = distinct_lines(rng, spec.unique_addrs);
    const auto n = lines.size();
    // Sattolo: a single cycle through every node.
    std::vector<std::size_t> next(n);
    std::iota(next.begin(), next.end(), 0);
    for (std::size_t i = n - 1; i > 0; --i) std::swap(next[i], next[draw_below(rng, i)]);
    Trace t;
    t.reserve(n * spec.repetitions);
    std::size_t cur = 0;
    for (std::uint64_t step = 0; step < n * spec.repetitions; ++step) {
        t.push_back({generator_pc::kPointerChase, lines[cur], AccessKind::Demand});
        cur = next[cur];
    }
    return t;
}

Trace strided(Rng& rng, const TraceSpec& spec) {
    const auto span = static_cast<std::int64_t>(spec.unique_addrs) * std::abs(spec.stride_lines);
    if (span >= static_cast<std::int64_t>(kSyntheticHeapLines / 2))
        throw Error(ErrorKind::UnsupportedSpec, "strided kernel exceeds the synthetic heap");
    auto base = static_cast<std::int64_t>(kSyntheticHeapBase + kSyntheticHeapLines / 2) +
                static_cast<std::int64_t>(draw_below(rng, kSyntheticHeapLines / 4));
    Trace t;
    t.reserve(spec.unique_addrs * spec.repetitions);
    for (std::uint64_t r = 0; r < spec.repetitions; ++r)
        for (std::uint64_t i = 0; i < spec.unique_addrs; ++i)
            t.push_back({generator_pc::kStrided,
                         static_cast<std::uint64_t>(base + static_cast<std::int64_t>(i) * spec.stride_lines),
                         AccessKind::Demand});
    return t;
}

Trace mixed(Rng& rng, const TraceSpec& spec) {
    std::vector<Trace> parts;
    parts.push_back(temporal_loop(rng, spec, generator_pc::kTemporal));
    parts.push_back(pointer_chase(rng, spec));
    parts.push_back(strided(rng, spec));
    std::uint64_t total = 0;
    for (const auto& p : parts) total += p.size();
    Trace noise;
    for (std::uint64_t i = 0, k = noise_count(total, spec.noise_ratio); i < k; ++i)
        noise.push_back({generator_pc::kNoise, random_heap_line(rng), AccessKind::Demand});
    parts.push_back(std::move(noise));

    // Weighted merge by remaining length keeps each stream's internal order.
    std::vector<std::size_t> pos(parts.size(), 0);
    std::uint64_t remaining = total + parts.back().size();
    Trace out;
    out.reserve(remaining);
    while (remaining > 0) {
        auto pick = draw_below(rng, remaining);
        for (std::size_t i = 0; i < parts.size(); ++i) {
            auto left = parts[i].size() - pos[i];
            if (pick < left) {
                out.push_back(parts[i][pos[i]++]);
                break;
            }
            pick -= left;
        }
        --remaining;
    }
    return out;
}

// Degree-8 stride prefetcher in front of the LLC stream: once a PC shows the
// same non-zero delta twice it covers the next 8 strides, then keeps the
// window 8 strides ahead.
Trace add_l1_stride_fills(const Trace& demand) {
    struct StrideState {
        std::uint64_t last = 0;
        std::int64_t delta = 0;
        bool seen = false;
        bool steady = false;
    };
    constexpr int kDegree = 8;
    std::unordered_map<std::uint64_t, StrideState> state;
    Trace out;
    out.reserve(demand.size() * 2);
    for (const auto& a : demand) {
        out.push_back(a);
        auto& s = state[a.pc];
        auto delta = static_cast<std::int64_t>(a.line_addr - s.last);
        bool confirm = s.seen && delta != 0 && delta == s.delta;
        if (confirm) {
            int first = s.steady ? kDegree : 1;
            for (int k = first; k <= kDegree; ++k) {
                auto target = static_cast<std::int64_t>(a.line_addr) + delta * k;
                if (target >= 0 && static_cast<std::uint64_t>(target) < kLineAddrLimit)
                    out.push_back({a.pc, static_cast<std::uint64_t>(target), AccessKind::L1PrefetchFill});
            }
        }
        s.steady = confirm;
        s.delta = s.seen ? delta : 0;
        s.last = a.line_addr;
        s.seen = true;
    }
    return out;
}

}  // namespace

Trace generate_trace(const TraceSpec& spec) {
    validate(spec);
    Rng rng(spec.seed);
    Trace t;
    switch (spec.pattern) {
    case TracePattern::TemporalLoop:
        t = temporal_loop(rng, spec, generator_pc::kTemporal);
        break;
    case TracePattern::InterleavedNoise: {
        auto base = temporal_loop(rng, spec, generator_pc::kTemporal);
        auto noise = noise_count(base.size(), spec.noise_ratio);
        t = interleave_noise(rng, base, noise);
        break;
    }
    case TracePattern::MultiTarget:
        t = multi_target(rng, spec);
        break;
    case TracePattern::PointerChase:
        t = pointer_chase(rng, spec);
        break;
    case TracePattern::StridedKernel:
        t = strided(rng, spec);
        break;
    case TracePattern::Mixed:
        t = mixed(rng, spec);
        break;
    }
    if (spec.l1_stride_prefetch) t = add_l1_stride_fills(t);
    return t;
}

TracePattern parse_trace_pattern(const std::string& name) {
    static const std::pair<const char*, TracePattern> names[] = {
        {"temporal_loop", TracePattern::TemporalLoop},
        {"interleaved_noise", TracePattern::InterleavedNoise},
        {"multi_target", TracePattern::MultiTarget},
        {"pointer_chase", TracePattern::PointerChase},
        {"strided_kernel", TracePattern::StridedKernel},
        {"mixed", TracePattern::Mixed},
    };
    for (const auto& [n, p] : names)
        if (name == n) return p;
    throw Error(ErrorKind::Usage, "unknown trace pattern '" + name + "'");
}

std::string to_string(TracePattern pattern) {
    switch (pattern) {
    case TracePattern::TemporalLoop: return "temporal_loop";
    case TracePattern::InterleavedNoise: return "interleaved_noise";
    case TracePattern::MultiTarget: return "multi_target";
    case TracePattern::PointerChase: return "pointer_chase";
    case TracePattern::StridedKernel: return "strided_kernel";
    case TracePattern::Mixed: return "mixed";
    }
    return "unknown";
}

std::vector<FanoutProbability> parse_fanout_distribution(const std::string& s) {
    std::vector<FanoutProbability> dist;
    for (auto item : text::split(s, ',')) {
        auto parts = text::split(text::trim(item), ':');
        std::optional<std::uint64_t> fanout;
        std::optional<double> p;
        if (parts.size() == 2) {
            fanout = text::parse_u64(text::trim(parts[0]));
            p = text::parse_double(text::trim(parts[1]));
        }
        if (!fanout || !p)
            throw Error(ErrorKind::Parse, "bad fanout distribution item '" + std::string(item) + "'");
        dist.push_back({static_cast<unsigned>(*fanout), *p});
    }
    return dist;
}

std::string format_fanout_distribution(std::span<const FanoutProbability> dist) {
    std::ostringstream os;
    os.precision(17);
    for (std::size_t i = 0; i < dist.size(); ++i) {
        if (i) os << ',';
        os << dist[i].fanout << ':' << dist[i].probability;
    }
    return os.str();
}

}  // namespace prophet
