#include "prophet/report.hpp"

#include <fstream>
#include <istream>
#include <map>
#include <ostream>

#include "prophet/error.hpp"
#include "prophet/simulation.hpp"
#include "text_util.hpp"

namespace prophet {

namespace {
constexpr std::size_t kReportColumns = 9;
constexpr std::size_t kCoverageColumn = 6;
}  // namespace

std::vector<ReportRow> read_report_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || text::trim(line) != kReportCsvHeader)
        throw Error(ErrorKind::Schema, "report: header does not match the report CSV layout");
    std::vector<ReportRow> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        auto body = text::trim(line);
        if (body.empty()) continue;
        auto parts = text::split(body, ',');
        if (parts.size() != kReportColumns)
            throw Error(ErrorKind::Schema, "report: line " + std::to_string(lineno) + " has " +
                                               std::to_string(parts.size()) + " columns, expected 9");
        ReportRow row;
        for (auto p : parts) row.fields.emplace_back(p);
        auto cov = text::parse_double(parts[kCoverageColumn]);
        if (!cov)
            throw Error(ErrorKind::Schema, "report: line " + std::to_string(lineno) + ": bad coverage");
        row.coverage = *cov;
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<ReportRow> load_report_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
    try {
        return read_report_csv(in);
    } catch (const Error& e) {
        throw Error(e.kind(), path.string() + ": " + e.what());
    }
}

void write_aggregate_csv(std::ostream& out, const std::vector<ReportRow>& rows) {
    std::map<std::string, double> reference;
    out << kReportCsvHeader << ",coverage_delta\n";
    for (const auto& row : rows) {
        auto [it, first] = reference.try_emplace(row.run_id(), row.coverage);
        for (std::size_t i = 0; i < row.fields.size(); ++i) out << (i ? "," : "") << row.fields[i];
        out << ',' << format_fraction(row.coverage - it->second) << '\n';
    }
}

}  // namespace prophet
