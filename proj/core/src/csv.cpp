#include "caselink/csv.hpp"

#include "caselink/errors.hpp"

namespace caselink::csv {

std::optional<Record> Reader::next() {
  int c = in_.get();
  // blank lines between records are tolerated
  while (c == '\n' || c == '\r') {
    if (c == '\n') ++line_;
    c = in_.get();
  }
  if (c == std::char_traits<char>::eof()) return std::nullopt;

  Record rec;
  rec.line = line_;
  std::string field;
  bool quoted = false;
  bool after_quote = false;
  for (;; c = in_.get()) {
    if (c == std::char_traits<char>::eof()) {
      if (quoted) throw ParseError(rec.line, "unterminated quoted field");
      rec.fields.push_back(std::move(field));
      return rec;
    }
    const char ch = static_cast<char>(c);
    if (quoted) {
      if (ch == '"') {
        if (in_.peek() == '"') {
          in_.get();
          field.push_back('"');
        } else {
          quoted = false;
          after_quote = true;
        }
      } else {
        if (ch == '\n') ++line_;
        field.push_back(ch);
      }
      continue;
    }
    if (ch == ',') {
      rec.fields.push_back(std::move(field));
      field.clear();
      after_quote = false;
    } else if (ch == '\n' || ch == '\r') {
      if (ch == '\r' && in_.peek() == '\n') in_.get();
      ++line_;
      rec.fields.push_back(std::move(field));
      return rec;
    } else if (ch == '"') {
      if (!field.empty() || after_quote) throw ParseError(line_, "stray quote inside field");
      quoted = true;
    } else {
      if (after_quote) throw ParseError(line_, "characters after closing quote");
      field.push_back(ch);
    }
  }
}

void Reader::expect_header(const std::vector<std::string_view>& expected) {
  auto rec = next();
  if (!rec) throw ParseError(1, "missing header");
  bool ok = rec->fields.size() == expected.size();
  for (std::size_t i = 0; ok && i < expected.size(); ++i) ok = rec->fields[i] == expected[i];
  if (!ok) {
    std::string want;
    for (auto e : expected) want += (want.empty() ? "" : ",") + std::string(e);
    throw ParseError(rec->line, "unexpected header, expected " + want);
  }
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

std::string join(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(',');
    out += escape(fields[i]);
  }
  return out;
}

}  // namespace caselink::csv
