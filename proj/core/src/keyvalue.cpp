#include "caselink/keyvalue.hpp"

#include <charconv>
#include <cmath>

#include "caselink/errors.hpp"

namespace caselink {

namespace {
std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}
}  // namespace

std::vector<std::pair<std::string, std::string>> parse_key_values(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    auto text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) throw ParseError(n, "expected key=value");
    const auto key = trim(text.substr(0, eq));
    if (key.empty()) throw ParseError(n, "empty key");
    out.emplace_back(std::string(key), std::string(trim(text.substr(eq + 1))));
  }
  return out;
}

bool parse_bool_value(std::string_view s) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw InvalidArgument("invalid boolean '" + std::string(s) + "'");
}

std::uint64_t parse_uint_value(std::string_view s) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw InvalidArgument("invalid unsigned integer '" + std::string(s) + "'");
  }
  return v;
}

double parse_double_value(std::string_view s) {
  double v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw InvalidArgument("invalid number '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace caselink
