#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace prophet {

struct StorageRow {
    std::string structure;
    std::uint64_t entries = 0;
    std::uint64_t bits_per_entry = 0;
    std::uint64_t bits = 0;
};

/// Prophet's added on-chip state at its default sizing: 2-bit replacement
/// state for a 196,608-entry table, the 128-entry hint buffer and the
/// 65,536-entry victim buffer. The table payload lives in LLC ways and is
/// listed separately.
std::vector<StorageRow> default_storage_table();

/// bits / 8192, i.e. KiB.
double kib(std::uint64_t bits);

/// "structure,entries,bits_per_entry,bits,bytes,kib" rows.
void write_storage_table(std::ostream& out, const std::vector<StorageRow>& rows);

}  // namespace prophet
