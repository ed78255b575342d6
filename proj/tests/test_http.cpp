#include <doctest.h>

#include <httplib.h>
#include <json.hpp>
#include <thread>

#include "caselink/case_service.hpp"
#include "caselink/http_api.hpp"
#include "support.hpp"

using namespace caselink;
using nlohmann::json;

namespace {

constexpr const char* kAdmin = "admin-secret";

class Server {
 public:
  Server()
      : service_(std::make_unique<SqliteCaseStore>(":memory:")),
        api_(service_, kAdmin),
        port_(api_.bind_to_any_port("127.0.0.1")),
        thread_([this] { api_.listen_after_bind(); }) {
    api_.wait_until_ready();
  }
  ~Server() {
    api_.stop();
    thread_.join();
  }

  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port_);
    c.set_connection_timeout(5);
    return c;
  }

 private:
  CaseService service_;
  HttpApi api_;
  int port_;
  std::thread thread_;
};

httplib::Headers bearer(const std::string& token) { return {{"Authorization", "Bearer " + token}}; }

std::string create_zone(httplib::Client& c, const std::string& id) {
  auto r = c.Post("/zones", bearer(kAdmin), json{{"zone_id", id}, {"name", id}}.dump(), "application/json");
  REQUIRE(r);
  REQUIRE(r->status == 201);
  return json::parse(r->body)["token"].get<std::string>();
}

int post(httplib::Client& c, const std::string& token, const std::string& path, const json& body) {
  auto r = c.Post(path, bearer(token), body.dump(), "application/json");
  REQUIRE(r);
  return r->status;
}

json get(httplib::Client& c, const std::string& token, const std::string& path, int expect = 200) {
  auto r = c.Get(path, bearer(token));
  REQUIRE(r);
  CHECK(r->status == expect);
  return json::parse(r->body);
}

}  // namespace

TEST_SUITE("http") {
  TEST_CASE("zones need the admin token") {
    Server s;
    auto c = s.client();
    auto r = c.Post("/zones", bearer("wrong"), R"({"zone_id":"a"})", "application/json");
    REQUIRE(r);
    CHECK(r->status == 401);
    CHECK(json::parse(r->body).contains("error"));
    const auto token = create_zone(c, "a");
    CHECK_FALSE(token.empty());
    r = c.Post("/zones", bearer(kAdmin), R"({"zone_id":"a"})", "application/json");
    CHECK(r->status == 409);
    r = c.Post("/zones", bearer(kAdmin), "not json", "application/json");
    CHECK(r->status == 400);
  }

  TEST_CASE("case workflow") {
    Server s;
    auto c = s.client();
    const auto a = create_zone(c, "zone-a");
    const auto b = create_zone(c, "zone-b");

    CHECK(post(c, "nope", "/cases", {{"case_id", "BY1234-000001-22/1"}, {"category", "sextortion"}}) == 401);
    CHECK(post(c, a, "/cases", {{"case_id", "BY1234-000001-22/1"}, {"category", "sextortion"}}) == 201);
    CHECK(post(c, a, "/cases", {{"case_id", "BY1234-000001-22/1"}, {"category", "sextortion"}}) == 409);
    CHECK(post(c, a, "/cases", {{"case_id", "BY12-000001-22/1"}, {"category", "sextortion"}}) == 400);
    CHECK(post(c, a, "/cases", {{"case_id", "BY1234-000009-22/1"}}) == 400);
    CHECK(post(c, b, "/cases", {{"case_id", "BY5678-000002-22/1"}, {"category", "cyberfraud"}}) == 201);

    const auto ann = json{{"address", "shared"}, {"role", "perpetrator"}};
    CHECK(post(c, a, "/cases/BY1234-000001-22/1/annotations", ann) == 201);
    CHECK(post(c, a, "/cases/BY1234-000001-22/1/annotations", ann) == 409);
    CHECK(post(c, a, "/cases/BY1234-000001-22/1/annotations", {{"address", "y"}, {"role", "launderer"}}) == 400);
    CHECK(post(c, b, "/cases/BY1234-000001-22/1/annotations", {{"address", "y"}, {"role", "victim"}}) == 404);
    CHECK(post(c, a, "/cases/BY9999-000001-22/1/annotations", ann) == 404);
    CHECK(post(c, b, "/cases/BY5678-000002-22/1/annotations", ann) == 201);

    const auto detail = get(c, a, "/cases/BY1234-000001-22/1");
    CHECK(detail["annotations"].size() == 1);
    CHECK(detail["annotations"][0]["role"] == "perpetrator");
    get(c, a, "/cases/BY5678-000002-22/1", 404);
    CHECK(get(c, a, "/cases")["cases"].size() == 1);

    auto clusters = get(c, a, "/clusters?level=address");
    CHECK(clusters["stale"] == true);

    auto r = c.Post("/relink?wait=true", bearer(a), "", "application/json");
    REQUIRE(r);
    CHECK(r->status == 200);
    clusters = get(c, a, "/clusters?level=address");
    CHECK(clusters["stale"] == false);
    CHECK(clusters["level"] == "address");
    REQUIRE(clusters["clusters"].size() == 1);
    CHECK(clusters["clusters"][0]["case_ids"] == json::array({"BY1234-000001-22/1"}));
    CHECK(clusters["clusters"][0]["anonymized_stubs"] == 1);
    CHECK(clusters["clusters"][0]["size"] == 2);

    get(c, a, "/clusters?level=wallet", 400);

    const auto net = get(c, a, "/network?level=address&format=json");
    CHECK(net["nodes"].size() == 2);
    CHECK(net["edges"].size() == 1);
    r = c.Get("/network?level=address&format=dot", bearer(a));
    REQUIRE(r);
    CHECK(r->body.rfind("graph case_network {", 0) == 0);
    get(c, a, "/network?format=png", 400);
  }

  TEST_CASE("grants over HTTP") {
    Server s;
    auto c = s.client();
    const auto a = create_zone(c, "zone-a");
    const auto b = create_zone(c, "zone-b");
    CHECK(post(c, a, "/cases", {{"case_id", "BY1234-000001-22/1"}, {"category", "sextortion"}}) == 201);
    get(c, b, "/cases/BY1234-000001-22/1", 404);
    CHECK(post(c, a, "/zones/zone-a/grants", {{"reader_zone", "zone-b"}}) == 401);
    CHECK(post(c, kAdmin, "/zones/zone-a/grants", {{"reader_zone", "zone-b"}}) == 201);
    CHECK(post(c, kAdmin, "/zones/zone-a/grants", {{"reader_zone", "zone-x"}}) == 404);
    CHECK(get(c, b, "/cases/BY1234-000001-22/1")["zone_id"] == "zone-a");
    CHECK(post(c, b, "/cases/BY1234-000001-22/1/annotations", {{"address", "y"}, {"role", "victim"}}) == 403);
  }

  TEST_CASE("exchange requests over HTTP") {
    Server s;
    auto c = s.client();
    const auto a = create_zone(c, "zone-a");
    const auto b = create_zone(c, "zone-b");
    auto lookup = get(c, a, "/addresses/bc1qxyz/requests");
    CHECK(lookup["entries"].empty());
    CHECK(lookup["any_other_zone_requested"] == false);
    CHECK(post(c, a, "/addresses/bc1qxyz/requests", {{"exchange", "Kraken"}}) == 201);
    CHECK(get(c, a, "/addresses/bc1qxyz/requests")["entries"].size() == 1);
    lookup = get(c, b, "/addresses/bc1qxyz/requests");
    CHECK(lookup["entries"].empty());
    CHECK(lookup["any_other_zone_requested"] == true);
    CHECK(post(c, a, "/addresses/bc1qxyz/requests", json::object()) == 400);
  }
}
