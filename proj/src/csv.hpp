#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace contacttrees::detail {

using CsvRow = std::vector<std::string>;

/// RFC 4180 reader: quoted fields, doubled quotes, CRLF or LF record ends.
/// A trailing newline does not produce an empty record.
std::vector<CsvRow> parse_csv(std::string_view bytes, const std::string& name);

/// Quotes only fields containing a comma, quote, CR or LF. LF record ends.
std::string write_csv(const std::vector<CsvRow>& rows);

}  // namespace contacttrees::detail
