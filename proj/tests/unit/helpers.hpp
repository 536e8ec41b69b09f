#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "prophet/trace.hpp"

namespace testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::uint64_t counter = 0;
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("prophet_" + tag + "_" + std::to_string(rd()) + "_" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void spit(const std::filesystem::path& p, const std::string& body) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << body;
}

inline prophet::MemoryAccess demand(std::uint64_t pc, std::uint64_t line) {
    return {pc, line, prophet::AccessKind::Demand};
}

// Trace of `lines` repeated `passes` times under one PC.
inline prophet::Trace loop_trace(std::uint64_t pc, const std::vector<std::uint64_t>& lines,
                                 int passes) {
    prophet::Trace t;
    for (int p = 0; p < passes; ++p)
        for (auto l : lines) t.push_back(demand(pc, l));
    return t;
}

// `count` consecutive lines from the synthetic heap. Consecutive lines never
// alias in the compressed table key while count stays below 2^18.
inline std::vector<std::uint64_t> consecutive_lines(std::uint64_t count) {
    std::vector<std::uint64_t> v;
    for (std::uint64_t i = 0; i < count; ++i) v.push_back((std::uint64_t{1} << 28) + i);
    return v;
}

// Distinct successors of every line, following consecutive accesses of the
// same PC across the whole trace.
inline std::map<std::uint64_t, std::set<std::uint64_t>> successor_sets(const prophet::Trace& t) {
    std::map<std::uint64_t, std::set<std::uint64_t>> succ;
    std::map<std::uint64_t, std::uint64_t> last;
    for (const auto& a : t) {
        auto it = last.find(a.pc);
        if (it != last.end()) succ[it->second].insert(a.line_addr);
        last[a.pc] = a.line_addr;
    }
    return succ;
}

}  // namespace testing
