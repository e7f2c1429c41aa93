#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace coss {

/// A parsed CSV file: one header row, data rows, and any leading '#' comment
/// lines (used for plan metadata). Fields may be double-quoted with ""
/// escaping; embedded newlines are not supported.
struct CsvTable {
    std::vector<std::string> comments;  // '#' lines, verbatim without the '#'
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::optional<std::size_t> column(const std::string& name) const;
    std::size_t require_column(const std::string& name) const;  ///< CsvError if absent
};

CsvTable read_csv(std::istream& in, const std::string& source_name = "<stream>");
CsvTable read_csv_file(const std::filesystem::path& path);

/// Quote a field if it contains a delimiter, quote or CR/LF.
std::string csv_escape(const std::string& field);

/// Locale-independent double parse ('.' decimal point); CsvError on junk.
double parse_double(const std::string& text, const std::string& context);

/// Shortest round-trip representation (std::to_chars): byte-stable output.
std::string format_double(double value);

/// Write-then-rename so readers never observe a partial file.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace coss
