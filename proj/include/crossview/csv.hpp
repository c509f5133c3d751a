#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace crossview::io {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Header index for an exact column name, or nullopt.
    std::optional<std::size_t> column(std::string_view name) const;
};

// RFC 4180 flavor: comma-separated, optional CRLF line ends, double-quoted
// fields with "" escapes. The first record is the header. Structural
// problems raise ParseError with a byte offset.
CsvTable parse_csv(std::string_view text);

} // namespace crossview::io
