#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace caselink::csv {

struct Record {
  std::size_t line = 0;  // line on which the record starts, 1-based
  std::vector<std::string> fields;
};

/// RFC-4180 reader: quoted fields may contain commas, doubled quotes and line
/// breaks. Accepts LF or CRLF record terminators.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::optional<Record> next();

  /// Reads the first record and checks it equals `expected`. Throws ParseError.
  void expect_header(const std::vector<std::string_view>& expected);

 private:
  std::istream& in_;
  std::size_t line_ = 1;
};

/// Quotes a field when it contains a comma, quote or line break.
std::string escape(std::string_view field);

std::string join(const std::vector<std::string>& fields);

}  // namespace caselink::csv
