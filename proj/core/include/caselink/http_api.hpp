#pragma once

#include <memory>
#include <string>

#include "caselink/case_service.hpp"

namespace caselink {

/// HTTP/JSON front end of CaseService.
///
///   POST /zones                      (admin token) create zone, returns first member token
///   POST /zones/{id}/grants          (admin token) {"reader_zone": ...}
///   POST /cases                      {"case_id", "category"}
///   GET  /cases, GET /cases/{id}
///   POST /cases/{id}/annotations     {"address", "role"}
///   POST /relink[?wait=true]
///   GET  /clusters?level=
///   GET  /network?level=&format=json|dot
///   GET  /addresses/{addr}/requests
///   POST /addresses/{addr}/requests  {"exchange"}
///
/// Every route needs "Authorization: Bearer <token>". Errors are
/// {"error": "..."} with status 400, 401, 403, 404 or 409.
class HttpApi {
 public:
  HttpApi(CaseService& service, std::string admin_token);
  ~HttpApi();
  HttpApi(const HttpApi&) = delete;
  HttpApi& operator=(const HttpApi&) = delete;

  /// Blocks until stop(). Returns false if the socket could not be bound.
  bool listen(const std::string& host, int port);
  /// Binds an ephemeral port and returns it; call listen_after_bind() next.
  int bind_to_any_port(const std::string& host);
  bool listen_after_bind();
  void wait_until_ready() const;
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace caselink
