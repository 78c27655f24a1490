#include "semdrought/service/http.hpp"

#include <httplib.h>

#include "semdrought/core/lexical.hpp"
#include "semdrought/ingest/raw_observation.hpp"

namespace semdrought::service {

using nlohmann::json;

int error_status(Errc code) noexcept {
  switch (code) {
    case Errc::UnknownRegion:
    case Errc::NoData:
      return 404;
    case Errc::OutOfOrder:
    case Errc::DuplicateObservation:
      return 409;
    case Errc::InsufficientBaseline:
      return 503;
    default:
      return 400;
  }
}

json error_body(const Error& e) {
  return json{{"error", e.name()}, {"term", e.subject()}, {"message", e.what()}};
}

namespace {

json accepted(const IngestResult& r) {
  json rules = json::array();
  for (const auto& f : r.firings) rules.push_back(f.rule);
  return json{{"status", "accepted"}, {"region", r.region}, {"id", r.subject}, {"firings", rules}};
}

HttpResponse route(Pipeline& pipeline, std::string_view method, std::string_view path,
                   const std::map<std::string, std::string>& query, std::string_view body) {
  if (path == "/health" && method == "GET")
    return {200, json{{"status", "ok"}, {"events", pipeline.events()}}};

  if (path == "/rules" && method == "GET") {
    json rules = json::array();
    const auto texts = pipeline.rule_texts();
    for (std::size_t i = 0; i < texts.size(); ++i)
      rules.push_back(json{{"name", pipeline.config().rule_set[i].name},
                           {"text", texts[i]},
                           {"ik", pipeline.ik_rules().contains(pipeline.config().rule_set[i].name)}});
    return {200, json{{"rules", rules}}};
  }

  if (path == "/forecast" && method == "GET") {
    const auto region = query.find("region");
    if (region == query.end() || region->second.empty())
      throw Error(Errc::MissingKey, "query parameter region is required", "region");
    std::optional<CalendarMonth> period;
    if (const auto p = query.find("period"); p != query.end()) {
      period = parse_year_month(p->second);
      if (!period) throw Error(Errc::BadTimestamp, "period must be YYYY-MM", p->second);
    }
    return {200, forecast::bulletin_to_json(pipeline.forecast(region->second, period))};
  }

  if (path == "/observations" && method == "POST")
    return {200, accepted(pipeline.commit(pipeline.prepare(ingest::parse_json_observation(body))))};

  if (path == "/ik" && method == "POST") {
    json doc;
    try {
      doc = json::parse(body);
    } catch (const json::parse_error& e) {
      throw Error(Errc::Malformed, std::string("IK payload: ") + e.what());
    }
    return {200, accepted(pipeline.commit(Prepared{ik::observation_from_json(doc)}))};
  }

  for (const char* known : {"/health", "/rules", "/forecast", "/observations", "/ik"})
    if (path == known) return {405, json{{"error", "MethodNotAllowed"}, {"term", std::string(method)}}};
  return {404, json{{"error", "NotFound"}, {"term", std::string(path)}}};
}

}  // namespace

HttpResponse handle_request(Pipeline& pipeline, std::string_view method, std::string_view path,
                            const std::map<std::string, std::string>& query, std::string_view body) {
  try {
    return route(pipeline, method, path, query, body);
  } catch (const Error& e) {
    return {error_status(e.code()), error_body(e)};
  } catch (const std::exception& e) {
    return {500, json{{"error", "Internal"}, {"term", ""}, {"message", e.what()}}};
  }
}

struct HttpServer::Impl {
  explicit Impl(Pipeline& p) : pipeline(p) {}
  Pipeline& pipeline;
  httplib::Server server;
};

HttpServer::HttpServer(Pipeline& pipeline) : impl_(std::make_unique<Impl>(pipeline)) {
  const auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    std::map<std::string, std::string> query;
    for (const auto& [k, v] : req.params) query.emplace(k, v);
    const auto out = handle_request(impl_->pipeline, req.method, req.path, query, req.body);
    res.status = out.status;
    res.set_content(out.body.dump(), "application/json");
  };
  for (const char* path : {"/health", "/rules", "/forecast", "/observations", "/ik"}) {
    impl_->server.Get(path, handler);
    impl_->server.Post(path, handler);
  }
  impl_->server.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (!res.body.empty()) return;
    res.set_content(json{{"error", "NotFound"}, {"term", req.path}}.dump(), "application/json");
  });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::listen() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_->server.is_running()) impl_->server.stop();
}

void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace semdrought::service
