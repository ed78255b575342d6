#include "caselink/types.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>

#include "caselink/errors.hpp"

namespace caselink {

Satoshi Transaction::input_total() const noexcept {
  Satoshi sum = 0;
  for (const auto& leg : inputs) sum += leg.value;
  return sum;
}

Satoshi Transaction::output_total() const noexcept {
  Satoshi sum = 0;
  for (const auto& leg : outputs) sum += leg.value;
  return sum;
}

namespace {

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

bool all_upper(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isupper(c); });
}

void expect_segment(std::string_view seg, std::size_t len, bool digits, const char* name) {
  if (seg.size() != len) {
    throw ParseError("file number: wrong " + std::string(name) + " length (expected " +
                     std::to_string(len) + ", got " + std::to_string(seg.size()) + ")");
  }
  if (digits ? !all_digits(seg) : !all_upper(seg)) {
    throw ParseError(std::string("file number: ") + name +
                     (digits ? " must be digits" : " must be upper-case letters"));
  }
}

}  // namespace

std::string FileNumber::to_string() const {
  return county + station + "-" + sequence + "-" + year + "/" + check;
}

FileNumber parse_file_number(std::string_view text) {
  const auto dash1 = text.find('-');
  const auto dash2 = dash1 == std::string_view::npos ? dash1 : text.find('-', dash1 + 1);
  const auto slash = dash2 == std::string_view::npos ? dash2 : text.find('/', dash2 + 1);
  if (dash1 == std::string_view::npos || dash2 == std::string_view::npos ||
      slash == std::string_view::npos) {
    throw ParseError("file number: missing separator in '" + std::string(text) + "'");
  }
  const auto head = text.substr(0, dash1);
  if (head.size() < 2) throw ParseError("file number: wrong county length");

  FileNumber fn;
  const auto county = head.substr(0, 2);
  const auto station = head.substr(2);
  const auto sequence = text.substr(dash1 + 1, dash2 - dash1 - 1);
  const auto year = text.substr(dash2 + 1, slash - dash2 - 1);
  const auto check = text.substr(slash + 1);
  expect_segment(county, 2, false, "county");
  expect_segment(station, 4, true, "station");
  expect_segment(sequence, 6, true, "sequence");
  expect_segment(year, 2, true, "year");
  expect_segment(check, 1, true, "check digit");
  fn.county = county;
  fn.station = station;
  fn.sequence = sequence;
  fn.year = year;
  fn.check = check;
  return fn;
}

std::vector<std::string> CaseRecord::perpetrator_addresses() const {
  std::vector<std::string> out;
  for (const auto& seed : seed_addresses) {
    if (seed.role == Role::perpetrator) out.push_back(seed.address);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string_view to_string(TagCategory c) noexcept {
  switch (c) {
    case TagCategory::exchange: return "exchange";
    case TagCategory::service: return "service";
    case TagCategory::spam_campaign: return "spam_campaign";
    case TagCategory::other: return "other";
  }
  return "other";
}

std::string_view to_string(CaseCategory c) noexcept {
  return c == CaseCategory::cyberfraud ? "cyberfraud" : "sextortion";
}

std::string_view to_string(Role r) noexcept {
  return r == Role::victim ? "victim" : "perpetrator";
}

TagCategory parse_tag_category(std::string_view s) {
  if (s == "exchange") return TagCategory::exchange;
  if (s == "service") return TagCategory::service;
  if (s == "spam_campaign") return TagCategory::spam_campaign;
  if (s == "other") return TagCategory::other;
  throw InvalidArgument("unknown tag category '" + std::string(s) + "'");
}

CaseCategory parse_case_category(std::string_view s) {
  if (s == "cyberfraud") return CaseCategory::cyberfraud;
  if (s == "sextortion") return CaseCategory::sextortion;
  throw InvalidArgument("unknown case category '" + std::string(s) + "'");
}

Role parse_role(std::string_view s) {
  if (s == "victim") return Role::victim;
  if (s == "perpetrator") return Role::perpetrator;
  throw InvalidArgument("role must be victim or perpetrator, got '" + std::string(s) + "'");
}

std::chrono::sys_days parse_iso_date(std::string_view s) {
  using namespace std::chrono;
  auto bad = [&] { return InvalidArgument("invalid ISO-8601 date '" + std::string(s) + "'"); };
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') throw bad();
  int y = 0;
  unsigned m = 0, d = 0;
  auto num = [&](std::string_view part, auto& out) {
    if (!all_digits(part)) throw bad();
    std::from_chars(part.data(), part.data() + part.size(), out);
  };
  num(s.substr(0, 4), y);
  num(s.substr(5, 2), m);
  num(s.substr(8, 2), d);
  const year_month_day ymd{year{y}, month{m}, day{d}};
  if (!ymd.ok()) throw bad();
  return sys_days{ymd};
}

std::string format_iso_date(std::chrono::sys_days d) {
  using namespace std::chrono;
  const year_month_day ymd{d};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

std::chrono::sys_days utc_day_of(Timestamp ts) noexcept {
  using namespace std::chrono;
  return floor<days>(sys_seconds{seconds{ts}});
}

}  // namespace caselink
