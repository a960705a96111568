#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace gammabench::io {

using CsvRow = std::vector<std::string>;

/// Quotes a field when it contains a comma, quote or line break.
std::string csv_escape(std::string_view field);
std::string csv_line(const CsvRow& row);

/// Parses RFC 4180 text: quoted fields may hold commas, doubled quotes and
/// newlines. Accepts LF or CRLF line endings; skips blank lines. Throws
/// InvalidArgumentError on an unterminated quote.
std::vector<CsvRow> parse_csv(std::string_view text);

/// Locale-independent shortest round-trip text for a double.
std::string format_double(double v);
/// Parses a double, accepting "inf". Throws InvalidArgumentError.
double parse_double(std::string_view text);

}  // namespace gammabench::io
