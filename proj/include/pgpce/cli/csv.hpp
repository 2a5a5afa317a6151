#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "pgpce/manifold.hpp"

namespace pgpce::cli {

using CsvRow = std::vector<std::string>;

/// Quotes a field when it contains a comma, quote, CR or LF (RFC 4180).
std::string csv_field(std::string_view s);
/// Shortest round-trippable decimal form, printf %.17g.
std::string format_number(double v);
std::string format_csv(const CsvRow& header, const std::vector<CsvRow>& rows);
/// Inverse of format_csv; first row is the header.
std::vector<CsvRow> parse_csv(std::string_view text);

/// Matrix as CSV with header c0..c{cols-1}.
std::string matrix_csv(const Matrix& m);

void write_text(const std::string& path, const std::string& text);

}  // namespace pgpce::cli
