#pragma once

// autohouse/api.hpp
//
// HTTP front end for a running Daemon.
//
//   GET  /v1/state
//   POST /v1/zones/{id}/light     {"on": bool}
//   POST /v1/alarm/arm | disarm | reset
//   GET  /v1/events?since=<seq>
//   GET  /v1/stream               server-sent events, one record per message
//   POST /v1/sim/inject           ScenarioEvent (t_ms optional, defaults to now)
//
// Handlers never touch controller state; they go through Daemon::call().

#include <memory>
#include <string>

#include <json.hpp>

#include "autohouse/controller.hpp"
#include "autohouse/daemon.hpp"

namespace httplib {
class Server;
}

namespace autohouse {

/// HTTP status code for a controller response.
int http_status(ResponseStatus status);

/// Body sent back for a controller response.
nlohmann::json response_body(const Response& r);

class ApiServer {
 public:
  explicit ApiServer(Daemon& daemon);
  ~ApiServer();

  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  /// Binds the listening socket. Port 0 picks a free port. Returns the bound
  /// port, or -1 on failure.
  int bind(const std::string& host, int port);

  /// Serves until stop(). Call after bind().
  bool listen();

  /// Blocks until listen() is accepting connections.
  void wait_until_ready() const;

  void stop();

 private:
  void install_routes();

  Daemon& daemon_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace autohouse
