#include "autohouse/api.hpp"

#include <atomic>
#include <charconv>

#include <httplib.h>

namespace autohouse {

namespace {

constexpr const char* kJson = "application/json";

void send_json(httplib::Response& res, int status, const nlohmann::json& body) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

void bad_request(httplib::Response& res, std::vector<std::string> violations) {
  send_json(res, 400, {{"status", "bad-request"}, {"message", "malformed request"}, {"violations", violations}});
}

void send_response(httplib::Response& res, const Response& r) { send_json(res, http_status(r.status), response_body(r)); }

std::optional<std::uint64_t> parse_seq(const std::string& text) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

std::string sse_message(const EventRecord& r) {
  return "id: " + std::to_string(r.seq) + "\nevent: " + std::string(to_string(r.kind)) + "\ndata: " +
         record_to_line(r) + "\n\n";
}

}  // namespace

int http_status(ResponseStatus status) {
  switch (status) {
    case ResponseStatus::Ok:
    case ResponseStatus::NoOp: return 200;
    case ResponseStatus::NotFound: return 404;
    case ResponseStatus::Unsupported: return 409;
    case ResponseStatus::BadRequest: return 400;
  }
  return 500;
}

nlohmann::json response_body(const Response& r) {
  nlohmann::json body{{"status", to_string(r.status)}, {"message", r.message}};
  if (!r.body.empty()) body["data"] = r.body;
  return body;
}

ApiServer::ApiServer(Daemon& daemon) : daemon_(daemon), server_(std::make_unique<httplib::Server>()) {
  install_routes();
}

ApiServer::~ApiServer() { stop(); }

int ApiServer::bind(const std::string& host, int port) {
  if (port == 0) return server_->bind_to_any_port(host);
  return server_->bind_to_port(host, port) ? port : -1;
}

bool ApiServer::listen() { return server_->listen_after_bind(); }

void ApiServer::wait_until_ready() const { server_->wait_until_ready(); }

void ApiServer::stop() {
  if (server_->is_running()) server_->stop();
}

void ApiServer::install_routes() {
  auto& srv = *server_;

  srv.Get("/v1/state", [this](const httplib::Request&, httplib::Response& res) {
    auto r = daemon_.call(command::GetState{});
    if (r.status != ResponseStatus::Ok) return send_response(res, r);
    send_json(res, 200, r.body);
  });

  srv.Post(R"(/v1/zones/([^/]+)/light)", [this](const httplib::Request& req, httplib::Response& res) {
    nlohmann::json body;
    try {
      body = nlohmann::json::parse(req.body);
    } catch (const nlohmann::json::parse_error& err) {
      return bad_request(res, {std::string("body is not valid JSON: ") + err.what()});
    }
    std::vector<std::string> violations;
    if (!body.is_object()) {
      violations.push_back("body must be an object");
    } else {
      if (!body.contains("on")) violations.push_back("missing field 'on'");
      else if (!body["on"].is_boolean()) violations.push_back("field 'on' must be a boolean");
      for (const auto& [key, _] : body.items()) {
        if (key != "on") violations.push_back("unknown field '" + key + "'");
      }
    }
    if (!violations.empty()) return bad_request(res, std::move(violations));
    send_response(res, daemon_.call(command::SetLight{req.matches[1].str(), body["on"].get<bool>()}));
  });

  srv.Post("/v1/alarm/arm", [this](const httplib::Request&, httplib::Response& res) {
    send_response(res, daemon_.call(command::Arm{}));
  });
  srv.Post("/v1/alarm/disarm", [this](const httplib::Request&, httplib::Response& res) {
    send_response(res, daemon_.call(command::Disarm{}));
  });
  srv.Post("/v1/alarm/reset", [this](const httplib::Request&, httplib::Response& res) {
    send_response(res, daemon_.call(command::Reset{}));
  });

  srv.Get("/v1/events", [this](const httplib::Request& req, httplib::Response& res) {
    std::uint64_t since = 0;
    if (req.has_param("since")) {
      auto v = parse_seq(req.get_param_value("since"));
      if (!v) return bad_request(res, {"query parameter 'since' must be a non-negative integer"});
      since = *v;
    }
    nlohmann::json out = nlohmann::json::array();
    for (const auto& r : daemon_.log().since(since)) out.push_back(record_to_json(r));
    send_json(res, 200, out);
  });

  srv.Get("/v1/stream", [this](const httplib::Request& req, httplib::Response& res) {
    std::uint64_t since = daemon_.log().last_seq();
    std::string from;
    if (req.has_param("since")) from = req.get_param_value("since");
    else if (req.has_header("Last-Event-ID")) from = req.get_header_value("Last-Event-ID");
    if (!from.empty()) {
      auto v = parse_seq(from);
      if (!v) return bad_request(res, {"stream position must be a non-negative integer"});
      since = *v;
    }
    auto cursor = std::make_shared<std::uint64_t>(since);
    res.set_header("Cache-Control", "no-cache");
    res.set_chunked_content_provider("text/event-stream", [this, cursor](std::size_t, httplib::DataSink& sink) {
      auto& log = daemon_.log();
      if (!log.wait_after(*cursor, std::chrono::milliseconds(200))) {
        if (log.closed()) {
          sink.done();
          return true;
        }
        // Comment line keeps the connection alive and detects a gone client.
        static constexpr char kPing[] = ": ping\n\n";
        return sink.write(kPing, sizeof kPing - 1);
      }
      for (const auto& r : log.since(*cursor)) {
        const auto msg = sse_message(r);
        if (!sink.write(msg.data(), msg.size())) return false;
        *cursor = r.seq;
      }
      return true;
    });
  });

  srv.Post("/v1/sim/inject", [this](const httplib::Request& req, httplib::Response& res) {
    if (daemon_.config().backend != "sim") {
      return send_response(res, Response{ResponseStatus::Unsupported, "inject requires the simulator backend", {}});
    }
    nlohmann::json body;
    try {
      body = nlohmann::json::parse(req.body);
    } catch (const nlohmann::json::parse_error& err) {
      return bad_request(res, {std::string("body is not valid JSON: ") + err.what()});
    }
    command::Inject inject;
    try {
      inject.at_now = body.is_object() && !body.contains("t_ms");
      inject.event = sim::event_from_json(body, std::uint64_t{0});
    } catch (const sim::ScenarioError& err) {
      return bad_request(res, {err.what()});
    }
    send_response(res, daemon_.call(std::move(inject)));
  });
}

}  // namespace autohouse
