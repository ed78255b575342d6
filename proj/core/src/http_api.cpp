#include "caselink/http_api.hpp"

#include <httplib.h>
#include <json.hpp>

#include "caselink/errors.hpp"

namespace caselink {

using nlohmann::json;

namespace {

json to_json(const StoredCase& c) {
  return {{"case_id", c.case_id}, {"zone_id", c.zone_id}, {"category", to_string(c.category)}};
}

json to_json(const CaseAnnotation& a) {
  return {{"case_id", a.case_id},
          {"address", a.address},
          {"role", to_string(a.role)},
          {"author", a.author},
          {"created_at", a.created_at}};
}

json to_json(const CaseView& v) {
  auto j = to_json(v.record);
  j["annotations"] = json::array();
  for (const auto& a : v.annotations) j["annotations"].push_back(to_json(a));
  return j;
}

json to_json(const ExchangeRequest& r) {
  return {{"id", r.id},
          {"address", r.address},
          {"exchange", r.exchange},
          {"requested_at", r.requested_at},
          {"zone_id", r.zone_id}};
}

json to_json(const ClusterView& view) {
  json j{{"level", to_string(view.level)}, {"generation", view.generation}, {"stale", view.stale}};
  j["clusters"] = json::array();
  for (const auto& c : view.clusters) {
    json card{{"size", c.case_ids.size() + c.anonymized_stubs},
              {"case_ids", c.case_ids},
              {"anonymized_stubs", c.anonymized_stubs},
              {"inflow_satoshi", c.inflow},
              {"contains_service_evidence", c.contains_service_evidence}};
    card["shared_evidence"] = json::array();
    for (const auto& e : c.shared_evidence) card["shared_evidence"].push_back(e.to_string());
    j["clusters"].push_back(std::move(card));
  }
  return j;
}

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
  send_json(res, status, json{{"error", message}});
}

std::string bearer(const httplib::Request& req) {
  const auto h = req.get_header_value("Authorization");
  constexpr std::string_view prefix = "Bearer ";
  if (h.size() <= prefix.size() || h.compare(0, prefix.size(), prefix) != 0) return {};
  return h.substr(prefix.size());
}

json parse_body(const httplib::Request& req) {
  try {
    auto j = json::parse(req.body);
    if (!j.is_object()) throw InvalidArgument("request body must be a JSON object");
    return j;
  } catch (const json::exception&) {
    throw InvalidArgument("request body is not valid JSON");
  }
}

std::string string_field(const json& body, const char* key) {
  if (!body.contains(key) || !body[key].is_string()) {
    throw InvalidArgument(std::string("missing string field '") + key + "'");
  }
  return body[key].get<std::string>();
}

}  // namespace

struct HttpApi::Impl {
  CaseService& service;
  std::string admin_token;
  httplib::Server server;

  Impl(CaseService& s, std::string admin) : service(s), admin_token(std::move(admin)) { routes(); }

  template <typename Fn>
  httplib::Server::Handler guarded(Fn fn) {
    return [fn = std::move(fn)](const httplib::Request& req, httplib::Response& res) {
      try {
        fn(req, res);
      } catch (const Unauthorized& e) {
        send_error(res, 401, e.what());
      } catch (const Forbidden& e) {
        send_error(res, 403, e.what());
      } catch (const NotFound& e) {
        send_error(res, 404, e.what());
      } catch (const Conflict& e) {
        send_error(res, 409, e.what());
      } catch (const ParseError& e) {
        send_error(res, 400, e.what());
      } catch (const InvalidArgument& e) {
        send_error(res, 400, e.what());
      } catch (const std::exception& e) {
        send_error(res, 500, e.what());
      }
    };
  }

  Caller caller(const httplib::Request& req) const { return service.authenticate(bearer(req)); }

  void require_admin(const httplib::Request& req) const {
    const auto token = bearer(req);
    if (admin_token.empty() || token != admin_token) throw Unauthorized("admin token required");
  }

  static LinkLevel level_param(const httplib::Request& req) {
    return parse_link_level(req.has_param("level") ? req.get_param_value("level") : "address");
  }

  void routes() {
    server.Post("/zones", guarded([this](const httplib::Request& req, httplib::Response& res) {
      require_admin(req);
      const auto body = parse_body(req);
      Zone zone{string_field(body, "zone_id"), body.value("name", std::string()), {}};
      if (body.contains("readable_by")) {
        for (const auto& z : body["readable_by"]) zone.readable_by.insert(z.get<std::string>());
      }
      const auto member = body.value("member", std::string("admin"));
      const auto token = service.create_zone(zone, member);
      send_json(res, 201,
                json{{"zone_id", zone.zone_id}, {"name", zone.name}, {"readable_by", zone.readable_by}, {"token", token}});
    }));

    server.Post(R"(/zones/([^/]+)/grants)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      require_admin(req);
      const auto body = parse_body(req);
      const auto reader = string_field(body, "reader_zone");
      service.grant_read(req.matches[1].str(), reader);
      send_json(res, 201, json{{"zone_id", req.matches[1].str()}, {"reader_zone", reader}});
    }));

    server.Post("/cases", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto who = caller(req);
      const auto body = parse_body(req);
      const auto view = service.create_case(who, string_field(body, "case_id"), string_field(body, "category"));
      send_json(res, 201, to_json(view));
    }));

    server.Get("/cases", guarded([this](const httplib::Request& req, httplib::Response& res) {
      json out = json::array();
      for (const auto& c : service.list_cases(caller(req))) out.push_back(to_json(c));
      send_json(res, 200, json{{"cases", out}});
    }));

    // case ids contain a '/', so the annotation route must be matched first
    server.Post(R"(/cases/(.+)/annotations)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto who = caller(req);
      const auto body = parse_body(req);
      const auto a = service.annotate(who, req.matches[1].str(), string_field(body, "address"),
                                      string_field(body, "role"));
      send_json(res, 201, json{{"annotation", to_json(a)}, {"stale", service.stale()}});
    }));

    server.Get(R"(/cases/(.+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
      send_json(res, 200, to_json(service.get_case(caller(req), req.matches[1].str())));
    }));

    server.Post("/relink", guarded([this](const httplib::Request& req, httplib::Response& res) {
      caller(req);
      if (req.has_param("wait") && req.get_param_value("wait") == "true") {
        service.relink();
        send_json(res, 200, json{{"stale", service.stale()}});
      } else {
        service.request_relink();
        send_json(res, 202, json{{"queued", true}});
      }
    }));

    server.Get("/clusters", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto who = caller(req);
      send_json(res, 200, to_json(service.list_case_clusters(who, level_param(req))));
    }));

    server.Get("/network", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto who = caller(req);
      const auto level = level_param(req);
      const auto format = parse_network_format(req.has_param("format") ? req.get_param_value("format") : "json");
      const auto doc = export_network(service.network(who, level), format);
      res.status = 200;
      res.set_content(doc, format == NetworkFormat::json ? "application/json" : "text/vnd.graphviz");
    }));

    server.Get(R"(/addresses/(.+)/requests)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto lookup = service.was_requested(caller(req), req.matches[1].str());
      json entries = json::array();
      for (const auto& e : lookup.entries) {
        auto j = to_json(e.request);
        j["duplicate"] = e.duplicate;
        entries.push_back(std::move(j));
      }
      send_json(res, 200, json{{"entries", entries}, {"any_other_zone_requested", lookup.any_other_zone_requested}});
    }));

    server.Post(R"(/addresses/(.+)/requests)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto who = caller(req);
      const auto body = parse_body(req);
      send_json(res, 201, to_json(service.log_exchange_request(who, req.matches[1].str(), string_field(body, "exchange"))));
    }));
  }
};

HttpApi::HttpApi(CaseService& service, std::string admin_token)
    : impl_(std::make_unique<Impl>(service, std::move(admin_token))) {}

HttpApi::~HttpApi() { stop(); }

bool HttpApi::listen(const std::string& host, int port) { return impl_->server.listen(host, port); }

int HttpApi::bind_to_any_port(const std::string& host) { return impl_->server.bind_to_any_port(host); }

bool HttpApi::listen_after_bind() { return impl_->server.listen_after_bind(); }

void HttpApi::wait_until_ready() const { impl_->server.wait_until_ready(); }

void HttpApi::stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace caselink
