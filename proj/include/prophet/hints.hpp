#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace prophet {

inline constexpr std::size_t kHintBufferEntries = 128;
inline constexpr unsigned kPcTagBits = 9;
inline constexpr unsigned kHintBits = 3;  // insert bit + 2-bit priority
inline constexpr unsigned kHintEntryBits = kPcTagBits + kHintBits;
inline constexpr char kManifestHeader[] = "PRFHNT01";

/// 3-bit per-PC hint. Priority is meaningful only when insert is set.
struct Hint {
    bool insert = true;
    std::uint8_t priority = 3;

    friend bool operator==(const Hint&, const Hint&) = default;
};

/// Hint applied to instructions absent from the hint buffer: unfiltered,
/// top priority.
inline constexpr Hint kDefaultHint{true, 3};

struct HintEntry {
    std::uint64_t pc = 0;
    Hint hint;

    friend bool operator==(const HintEntry&, const HintEntry&) = default;
};

/// Application-level hints carried by the CSR.
struct CsrState {
    bool prophet_enabled = true;
    std::uint32_t metadata_ways = 8;
    // Runtime insertion policy; forced off whenever prophet_enabled is set.
    bool insertion_policy_enabled = false;
    bool resizing_from_profile = true;

    friend bool operator==(const CsrState&, const CsrState&) = default;
};

struct HintManifest {
    CsrState csr;
    std::vector<HintEntry> hints;

    friend bool operator==(const HintManifest&, const HintManifest&) = default;
};

/// Throws Error{Format} for a bad header, Error{Parse} (with line number) for
/// a malformed line, Error{Capacity} past 128 PCs and Error{Duplicate} for a
/// repeated PC.
HintManifest read_manifest(std::istream& in);
HintManifest load_manifest(const std::filesystem::path& path);
void write_manifest(std::ostream& out, const HintManifest& manifest);
void save_manifest(const std::filesystem::path& path, const HintManifest& manifest);

inline std::uint16_t pc_tag(std::uint64_t pc) {
    return static_cast<std::uint16_t>((pc >> 2) & ((1u << kPcTagBits) - 1));
}

/// 128-entry PC-tagged hint store consulted by the prefetcher.
class HintBuffer {
public:
    HintBuffer() = default;
    explicit HintBuffer(std::span<const HintEntry> entries);

    /// Matching entry by 9-bit tag; the first loaded entry wins on collision.
    std::optional<Hint> find(std::uint64_t pc) const;
    /// find(pc) or kDefaultHint.
    Hint hint_for(std::uint64_t pc) const { return find(pc).value_or(kDefaultHint); }

    std::size_t size() const { return tags_.size(); }
    bool empty() const { return tags_.empty(); }

    static constexpr std::uint64_t storage_bits() { return kHintBufferEntries * kHintEntryBits; }

private:
    std::vector<std::uint16_t> tags_;
    std::vector<Hint> hints_;
};

}  // namespace prophet
