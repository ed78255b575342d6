#pragma once

#include <cstdint>
#include <istream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace caselink {

/// Flat `key=value` text: one pair per line, '#' starts a comment, blank lines
/// ignored, whitespace around key and value trimmed. Keys may repeat; order is
/// preserved. Throws ParseError with the line number on a line without '='.
std::vector<std::pair<std::string, std::string>> parse_key_values(std::istream& in);

bool parse_bool_value(std::string_view s);
std::uint64_t parse_uint_value(std::string_view s);
double parse_double_value(std::string_view s);

}  // namespace caselink
