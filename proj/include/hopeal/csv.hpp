#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace hopeal::csv {

using Row = std::vector<std::string>;

/// Parses comma-separated text with double-quote quoting ("" escapes a quote
/// inside a quoted field). Accepts LF or CRLF record separators, strips a
/// leading UTF-8 byte-order mark and skips completely empty lines. Throws
/// InputError on an unterminated quoted field or stray characters after a
/// closing quote.
std::vector<Row> parse(std::string_view content);

/// Quotes the field when it contains a comma, quote, CR or LF.
std::string escape_field(std::string_view field);

/// One record terminated by LF.
std::string format_row(const Row& row);

}  // namespace hopeal::csv
