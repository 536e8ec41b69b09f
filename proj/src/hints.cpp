#include "prophet/hints.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <unordered_set>

#include "prophet/error.hpp"
#include "text_util.hpp"

namespace prophet {

HintManifest read_manifest(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || text::trim(line) != kManifestHeader)
        throw Error(ErrorKind::Format, "hint manifest: missing PRFHNT01 header");

    HintManifest m;
    std::unordered_set<std::uint64_t> seen;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        auto body = text::trim(line);
        if (body.empty() || body.front() == '#') continue;
        auto fail = [&](const std::string& what) {
            return Error(ErrorKind::Parse,
                         "hint manifest: line " + std::to_string(lineno) + ": " + what);
        };

        if (body.starts_with("csr.")) {
            auto kv = text::key_value(body.substr(4));
            if (!kv) throw fail("expected csr.<field>=<value>");
            auto [field, value] = *kv;
            if (field == "metadata_ways") {
                auto v = text::parse_u64(value);
                if (!v || *v > 64) throw fail("bad metadata_ways");
                m.csr.metadata_ways = static_cast<std::uint32_t>(*v);
                continue;
            }
            auto flag = text::parse_bool(value);
            if (!flag) throw fail("bad flag value");
            if (field == "prophet_enabled")
                m.csr.prophet_enabled = *flag;
            else if (field == "insertion_policy_enabled")
                m.csr.insertion_policy_enabled = *flag;
            else if (field == "resizing_from_profile")
                m.csr.resizing_from_profile = *flag;
            else
                throw fail("unknown csr field '" + std::string(field) + "'");
            continue;
        }

        std::optional<std::uint64_t> pc;
        std::optional<bool> insert;
        std::optional<std::uint64_t> prio;
        for (auto tok : text::tokens(body)) {
            auto kv = text::key_value(tok);
            if (!kv) throw fail("expected key=value tokens");
            auto [k, v] = *kv;
            if (k == "pc")
                pc = text::parse_hex(v);
            else if (k == "insert" && (v == "0" || v == "1"))
                insert = v == "1";
            else if (k == "prio")
                prio = text::parse_u64(v);
            else
                throw fail("unexpected token '" + std::string(tok) + "'");
        }
        if (!pc) throw fail("missing or bad pc");
        if (!insert) throw fail("missing insert bit");
        if (prio && *prio > 3) throw fail("prio must be 0..3");
        if (*insert && !prio) throw fail("prio required when insert=1");
        if (m.hints.size() == kHintBufferEntries)
            throw Error(ErrorKind::Capacity, "hint manifest: more than 128 hinted PCs (line " +
                                                 std::to_string(lineno) + ")");
        if (!seen.insert(*pc).second)
            throw Error(ErrorKind::Duplicate, "hint manifest: duplicate pc " + text::hex(*pc) +
                                                  " at line " + std::to_string(lineno));
        Hint h{*insert, static_cast<std::uint8_t>(*insert ? *prio : 0)};
        m.hints.push_back({*pc, h});
    }
    if (m.csr.prophet_enabled) m.csr.insertion_policy_enabled = false;
    return m;
}

HintManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
    try {
        return read_manifest(in);
    } catch (const Error& e) {
        throw Error(e.kind(), path.string() + ": " + e.what());
    }
}

void write_manifest(std::ostream& out, const HintManifest& m) {
    out << kManifestHeader << '\n';
    out << "csr.prophet_enabled=" << (m.csr.prophet_enabled ? 1 : 0) << '\n';
    out << "csr.metadata_ways=" << m.csr.metadata_ways << '\n';
    out << "csr.insertion_policy_enabled=" << (m.csr.insertion_policy_enabled ? 1 : 0) << '\n';
    out << "csr.resizing_from_profile=" << (m.csr.resizing_from_profile ? 1 : 0) << '\n';
    for (const auto& e : m.hints) {
        out << "pc=" << text::hex(e.pc) << " insert=" << (e.hint.insert ? 1 : 0);
        if (e.hint.insert) out << " prio=" << static_cast<int>(e.hint.priority);
        out << '\n';
    }
}

void save_manifest(const std::filesystem::path& path, const HintManifest& m) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
    write_manifest(out, m);
}

HintBuffer::HintBuffer(std::span<const HintEntry> entries) {
    if (entries.size() > kHintBufferEntries)
        throw Error(ErrorKind::Capacity, "hint buffer holds at most 128 entries");
    for (const auto& e : entries) {
        tags_.push_back(pc_tag(e.pc));
        hints_.push_back(e.hint);
    }
}

std::optional<Hint> HintBuffer::find(std::uint64_t pc) const {
    const auto tag = pc_tag(pc);
    for (std::size_t i = 0; i < tags_.size(); ++i)
        if (tags_[i] == tag) return hints_[i];
    return std::nullopt;
}

}  // namespace prophet
