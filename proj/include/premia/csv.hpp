#pragma once

#include <string>
#include <vector>

namespace premia {

/// Round-trippable decimal form ("%.17g").
std::string format_double(double v);

/// Joins already formatted fields into one CSV line terminated by '\n'.
std::string csv_row(const std::vector<double>& values);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    /// Column index by name; ValidationError if absent.
    std::size_t column(const std::string& name) const;
};

/// Parses numeric CSV with a single header line. ValidationError on ragged
/// rows or non-numeric fields.
CsvTable parse_csv(const std::string& text);

/// Writes content to a temporary file next to path and renames it into place.
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

}  // namespace premia
