#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace reviewgraph::csv {

using Row = std::vector<std::string>;

/// RFC 4180 reader: quoted fields may contain commas, doubled quotes and line
/// breaks. A trailing newline does not produce an empty row.
std::vector<Row> parse(std::string_view text);

/// Quotes the field when it contains a comma, quote, line break, or leading or
/// trailing space.
std::string escape(std::string_view field);

std::string join(const Row& fields);

}  // namespace reviewgraph::csv
