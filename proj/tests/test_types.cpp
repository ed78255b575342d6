#include <doctest.h>

#include "caselink/errors.hpp"
#include "caselink/types.hpp"

using namespace caselink;

TEST_SUITE("types") {
  TEST_CASE("file number segments") {
    const auto f = parse_file_number("BY1234-010123-22/6");
    CHECK(f.county == "BY");
    CHECK(f.station == "1234");
    CHECK(f.sequence == "010123");
    CHECK(f.year == "22");
    CHECK(f.check == "6");
    CHECK(f.to_string() == "BY1234-010123-22/6");
  }

  TEST_CASE("file number shape errors") {
    auto message = [](std::string_view text) {
      try {
        parse_file_number(text);
      } catch (const ParseError& e) {
        return std::string(e.what());
      }
      return std::string();
    };
    CHECK(message("BY12-010123-22/6").find("station length") != std::string::npos);
    CHECK(message("BY1234010123-22/6").find("separator") != std::string::npos);
    CHECK_FALSE(message("BY1234-01012-22/6").empty());
    CHECK_FALSE(message("BY1234-010123-2x/6").empty());
    CHECK_FALSE(message("BY1234-010123-22/").empty());
    CHECK_FALSE(message("B11234-010123-22/6").empty());
  }

  TEST_CASE("role names") {
    CHECK(parse_role("victim") == Role::victim);
    CHECK(parse_role("perpetrator") == Role::perpetrator);
    CHECK_THROWS_AS(parse_role("launderer"), InvalidArgument);
    CHECK(to_string(Role::perpetrator) == "perpetrator");
  }

  TEST_CASE("category and tag names") {
    CHECK(parse_case_category("sextortion") == CaseCategory::sextortion);
    CHECK(parse_tag_category("exchange") == TagCategory::exchange);
    CHECK_THROWS_AS(parse_tag_category("bank"), InvalidArgument);
  }

  TEST_CASE("utc day boundaries") {
    using namespace std::chrono;
    CHECK(utc_day_of(1640995200) == sys_days{2022y / January / 1});
    CHECK(utc_day_of(1640995199) == sys_days{2021y / December / 31});
    CHECK(utc_day_of(-1) == sys_days{1969y / December / 31});
    CHECK(format_iso_date(parse_iso_date("2024-02-29")) == "2024-02-29");
    CHECK_THROWS_AS(parse_iso_date("2023-02-29"), InvalidArgument);
    CHECK_THROWS_AS(parse_iso_date("2023-2-01"), InvalidArgument);
  }

  TEST_CASE("perpetrator addresses are sorted and unique") {
    CaseRecord c;
    c.seed_addresses = {{"b", Role::perpetrator}, {"v", Role::victim}, {"a", Role::perpetrator}, {"b", Role::perpetrator}};
    CHECK(c.perpetrator_addresses() == std::vector<std::string>{"a", "b"});
  }

  TEST_CASE("transaction totals") {
    Transaction t{"x", 0, {{"a", 5}, {"b", 7}}, {{"c", 11}}};
    CHECK(t.input_total() == 12);
    CHECK(t.output_total() == 11);
    CHECK_FALSE(t.is_coinbase());
    CHECK(Transaction{"cb", 0, {{"COINBASE", 1}}, {{"m", 1}}}.is_coinbase());
  }
}
