#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "stpls/linalg.hpp"

namespace stpls {

/// Parses a comma-separated numeric table whose first row is the header.
/// Blank or non-numeric cells raise ParseError naming the row and column.
DataMatrix parse_csv(std::string_view text, std::string_view source = "<memory>");
DataMatrix read_csv(const std::filesystem::path& path);

/// Shortest decimal string that parses back to the same double.
std::string format_double(double value);

/// Header line followed by rows, with shortest round-trip numbers.
std::string to_csv(const DataMatrix& data);

/// Writes `body` to `path`, throwing IoFailure on error.
void write_text_file(const std::filesystem::path& path, std::string_view body);

}  // namespace stpls
