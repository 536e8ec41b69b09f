#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>

#include "prophet/profiler.hpp"

namespace prophet {

inline constexpr char kStoreHeader[] = "PRFSTO01";
inline constexpr std::uint64_t kDefaultCapL = 8;

struct StoreRecord {
    double accuracy = 0.0;
    std::uint64_t misses = 0;

    friend bool operator==(const StoreRecord&, const StoreRecord&) = default;
};

/// Counters merged across program inputs.
struct CounterStore {
    std::map<std::uint64_t, StoreRecord> per_pc;
    std::uint64_t allocated = 0;
    // Completed learning loops.
    std::uint64_t loop_l = 0;
    std::uint64_t cap_L = kDefaultCapL;

    friend bool operator==(const CounterStore&, const CounterStore&) = default;
};

/// old absent: new. Otherwise old + (new - old) / min(l + 1, L).
double merge_pc(std::optional<double> old_value, double new_value, std::uint64_t l,
                std::uint64_t cap_L);

/// max(old, new).
std::uint64_t merge_app(std::uint64_t old_value, std::uint64_t new_value);

/// Merges a new counter file into the store: accuracies and miss counts with
/// merge_pc, allocated entries with merge_app; PCs missing from the new
/// counters are kept; loop_l advances by one.
CounterStore learn(CounterStore store, const CounterFile& counters);

/// Throws Error{Version} for a PRFSTO header with another version and
/// Error{Format} for anything else that is not a store file.
CounterStore read_store(std::istream& in);
CounterStore load_store(const std::filesystem::path& path);
void write_store(std::ostream& out, const CounterStore& store);
void save_store(const std::filesystem::path& path, const CounterStore& store);

}  // namespace prophet
