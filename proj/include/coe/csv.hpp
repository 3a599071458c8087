#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace coe::csv {

using Row = std::vector<std::string>;

/// Quotes a field when it contains a comma, quote, or line break.
std::string escape(std::string_view field);

/// Joins escaped fields with commas and terminates with '\n'.
std::string format_row(std::span<const std::string> fields);

/// RFC 4180 parse. Quoted fields may contain commas, doubled quotes and
/// newlines. Throws InputError on an unterminated quote.
std::vector<Row> parse(std::string_view content);

/// Shortest decimal text that round-trips to the same double.
std::string format_full(double value);

}  // namespace coe::csv
