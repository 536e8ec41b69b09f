#include "prophet/storage.hpp"

#include <cstdio>
#include <ostream>

#include "prophet/hints.hpp"
#include "prophet/metadata_table.hpp"
#include "prophet/victim_buffer.hpp"

namespace prophet {

std::vector<StorageRow> default_storage_table() {
    const auto table = MetadataTable::storage_for(kMaxTableEntries);
    return {
        {"metadata_payload_in_llc", kMaxTableEntries, kTableEntryBits, table.payload_bits},
        {"replacement_state", kMaxTableEntries, kReplacementStateBits, table.replacement_bits},
        {"hint_buffer", kHintBufferEntries, kHintEntryBits, HintBuffer::storage_bits()},
        {"victim_buffer", kDefaultVictimEntries, kVictimEntryBits,
         VictimBuffer::storage_bits(kDefaultVictimEntries)},
    };
}

double kib(std::uint64_t bits) { return static_cast<double>(bits) / 8192.0; }

void write_storage_table(std::ostream& out, const std::vector<StorageRow>& rows) {
    out << "structure,entries,bits_per_entry,bits,bytes,kib\n";
    char buf[32];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.2f", kib(r.bits));
        out << r.structure << ',' << r.entries << ',' << r.bits_per_entry << ',' << r.bits << ','
            << r.bits / 8 << ',' << buf << '\n';
    }
}

}  // namespace prophet
