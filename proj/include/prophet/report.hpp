#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace prophet {

struct ReportRow {
    std::vector<std::string> fields;  // the nine report columns, verbatim
    double coverage = 0.0;

    const std::string& run_id() const { return fields[0]; }
    const std::string& policy() const { return fields[1]; }
};

/// Reads one or more report rows. Throws Error{Schema} when the header or a
/// row does not match the report CSV layout.
std::vector<ReportRow> read_report_csv(std::istream& in);
std::vector<ReportRow> load_report_csv(const std::filesystem::path& path);

/// Rows in input order with a coverage_delta column: coverage minus the
/// coverage of the first row sharing the same run_id.
void write_aggregate_csv(std::ostream& out, const std::vector<ReportRow>& rows);

}  // namespace prophet
