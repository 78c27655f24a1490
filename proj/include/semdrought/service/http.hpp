#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>

#include <json.hpp>

#include "semdrought/core/error.hpp"
#include "semdrought/service/pipeline.hpp"

namespace semdrought::service {

struct HttpResponse {
  int status = 200;
  nlohmann::json body;
};

/// 404 UnknownRegion/NoData, 409 OutOfOrder/DuplicateObservation,
/// 503 InsufficientBaseline, 400 otherwise.
int error_status(Errc code) noexcept;
/// {"error": <name>, "term": <subject>, "message": <text>}
nlohmann::json error_body(const Error& e);

/// Routes one request; the socket server and the tests both call this.
HttpResponse handle_request(Pipeline& pipeline, std::string_view method, std::string_view path,
                            const std::map<std::string, std::string>& query, std::string_view body);

class HttpServer {
 public:
  explicit HttpServer(Pipeline& pipeline);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Port 0 binds an ephemeral port. Returns the bound port.
  int bind(const std::string& host, int port);
  /// Serves until stop().
  bool listen();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace semdrought::service
