#include <doctest.h>

#include <sstream>

#include "caselink/csv.hpp"
#include "caselink/errors.hpp"
#include "caselink/keyvalue.hpp"

using namespace caselink;

TEST_SUITE("csv") {
  TEST_CASE("quoted fields and CRLF") {
    std::istringstream in("a,b\r\n\"x,1\",\"say \"\"hi\"\"\"\r\n\"multi\nline\",z\n");
    csv::Reader r(in);
    r.expect_header({"a", "b"});
    auto rec = r.next();
    REQUIRE(rec);
    CHECK(rec->line == 2);
    CHECK(rec->fields == std::vector<std::string>{"x,1", "say \"hi\""});
    rec = r.next();
    REQUIRE(rec);
    CHECK(rec->line == 3);
    CHECK(rec->fields == std::vector<std::string>{"multi\nline", "z"});
    CHECK_FALSE(r.next());
  }

  TEST_CASE("empty trailing field") {
    std::istringstream in("a,,\n");
    csv::Reader r(in);
    CHECK(r.next()->fields == std::vector<std::string>{"a", "", ""});
  }

  TEST_CASE("errors carry line numbers") {
    std::istringstream in("h\nok\n\"open\n");
    csv::Reader r(in);
    r.next();
    r.next();
    try {
      r.next();
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
    }
  }

  TEST_CASE("header mismatch") {
    std::istringstream in("x,y\n");
    csv::Reader r(in);
    CHECK_THROWS_AS(r.expect_header({"a", "b"}), ParseError);
  }

  TEST_CASE("escape round trip") {
    CHECK(csv::escape("plain") == "plain");
    CHECK(csv::escape("a,b") == "\"a,b\"");
    CHECK(csv::escape("q\"") == "\"q\"\"\"");
    std::istringstream in(csv::join({"a,b", "c\"d", "e"}) + "\n");
    csv::Reader r(in);
    CHECK(r.next()->fields == std::vector<std::string>{"a,b", "c\"d", "e"});
  }
}

TEST_SUITE("csv") {
  TEST_CASE("key value files") {
    std::istringstream in("# comment\n a = 1 \n\nb=two=2\n");
    const auto kv = parse_key_values(in);
    REQUIRE(kv.size() == 2);
    CHECK(kv[0] == std::pair<std::string, std::string>{"a", "1"});
    CHECK(kv[1] == std::pair<std::string, std::string>{"b", "two=2"});

    std::istringstream bad("a=1\nnovalue\n");
    try {
      parse_key_values(bad);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
    }
    CHECK(parse_bool_value("true"));
    CHECK_FALSE(parse_bool_value("0"));
    CHECK_THROWS(parse_bool_value("maybe"));
    CHECK(parse_uint_value("42") == 42);
    CHECK_THROWS(parse_uint_value("-1"));
    CHECK(parse_double_value("2.5") == 2.5);
  }
}
