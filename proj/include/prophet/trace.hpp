#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace prophet {

enum class AccessKind : std::uint8_t {
    Demand = 0,
    L1PrefetchFill = 1,
};

/// One record of the L2/LLC access stream.
struct MemoryAccess {
    std::uint64_t pc = 0;
    std::uint64_t line_addr = 0;  // byte address >> 6
    AccessKind kind = AccessKind::Demand;

    friend bool operator==(const MemoryAccess&, const MemoryAccess&) = default;
};

using Trace = std::vector<MemoryAccess>;

inline constexpr unsigned kLineAddrBits = 58;
inline constexpr char kBinaryTraceMagic[] = "PRFTRC01";
inline constexpr std::size_t kBinaryRecordBytes = 17;
inline constexpr char kTextTraceHeader[] = "pc,line_addr,kind";

enum class TraceFormat { Binary, Text };

/// Reads a trace file. Throws Error{Io} when the file cannot be opened,
/// Error{Format} on a bad magic/header and Error{Parse} on a malformed record
/// (the message carries the byte offset or line number).
Trace load_trace(const std::filesystem::path& path, TraceFormat format);

/// Sniffs the first bytes of a file: binary magic means Binary, anything else
/// is treated as Text.
TraceFormat detect_trace_format(const std::filesystem::path& path);

void write_trace(const std::filesystem::path& path, std::span<const MemoryAccess> trace,
                 TraceFormat format);

Trace read_binary_trace(std::istream& in);
Trace read_text_trace(std::istream& in);
void write_binary_trace(std::ostream& out, std::span<const MemoryAccess> trace);
void write_text_trace(std::ostream& out, std::span<const MemoryAccess> trace);

// ---------------------------------------------------------------------------
// Synthetic generation

enum class TracePattern {
    TemporalLoop,
    InterleavedNoise,
    MultiTarget,
    PointerChase,
    StridedKernel,
    Mixed,
};

struct FanoutProbability {
    unsigned fanout = 1;
    double probability = 1.0;
};

/// Measured share of addresses with 1, 2 and 3 distinct Markov successors;
/// the remainder is assigned fanout 4.
std::vector<FanoutProbability> default_fanout_distribution();

inline constexpr unsigned kMaxGeneratorFanout = 4;

struct TraceSpec {
    TracePattern pattern = TracePattern::TemporalLoop;
    std::uint64_t unique_addrs = 1024;
    std::uint64_t repetitions = 4;
    double noise_ratio = 0.0;
    std::vector<FanoutProbability> target_fanout_dist = default_fanout_distribution();
    std::uint64_t seed = 1;
    // Stride in cache lines for StridedKernel.
    std::int64_t stride_lines = 1;
    // Emit degree-8 stride L1 prefetch fills ahead of strided demand streams.
    bool l1_stride_prefetch = false;
};

/// Checks the TraceSpec invariants; throws Error{UnsupportedSpec}.
void validate(const TraceSpec& spec);

/// Deterministic for a fixed spec (seed included).
Trace generate_trace(const TraceSpec& spec);

// PCs used by the generator. Each has a distinct hint-buffer tag.
namespace generator_pc {
inline constexpr std::uint64_t kTemporal = 0x400a10;
inline constexpr std::uint64_t kNoise = 0x400a24;
inline constexpr std::uint64_t kMultiTarget = 0x400a38;
inline constexpr std::uint64_t kPointerChase = 0x400a4c;
inline constexpr std::uint64_t kStrided = 0x400a60;
}  // namespace generator_pc

/// Base of the synthetic heap, in lines. All generated addresses share their
/// bits above bit 30 so compressed 31-bit targets decompress exactly.
inline constexpr std::uint64_t kSyntheticHeapBase = std::uint64_t{1} << 28;
inline constexpr std::uint64_t kSyntheticHeapLines = std::uint64_t{1} << 28;

TracePattern parse_trace_pattern(const std::string& name);
std::string to_string(TracePattern pattern);

/// Parses "1:0.5485,2:0.2088,..." into a fanout distribution.
std::vector<FanoutProbability> parse_fanout_distribution(const std::string& text);
std::string format_fanout_distribution(std::span<const FanoutProbability> dist);

}  // namespace prophet
