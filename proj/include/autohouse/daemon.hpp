#pragma once

// autohouse/daemon.hpp
//
// Runtime around a Controller. A Daemon owns the backend (and the simulated
// world when backend is "sim"), the event log and the controller. Two ways to
// drive it:
//
//   run_until(ms)  single-threaded, advances the sim clock one poll interval
//                  per tick; exactly reproducible
//   start()        spawns the control loop thread; other threads talk to it
//                  only through submit()/call() and read the event log
//
// All mutation of controller state happens on whichever thread drives it.

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <future>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "autohouse/controller.hpp"
#include "autohouse/event_log.hpp"
#include "autohouse/house.hpp"
#include "autohouse/sim.hpp"

namespace autohouse {

struct DaemonConfig {
  HouseConfig house = default_house();
  std::string backend = "sim";  // "sim" or "parport"
  std::optional<std::filesystem::path> scenario;
  bool arm_on_start = true;
  std::string bind = "127.0.0.1:8080";
  std::optional<std::filesystem::path> log_path;
};

/// Parses a daemon config document. `house` may be an inline HouseConfig or a
/// path; relative paths resolve against `base_dir`. Throws ConfigError listing
/// every problem, including house layout violations.
DaemonConfig daemon_config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir);

DaemonConfig load_daemon_config(const std::filesystem::path& path);

nlohmann::json daemon_config_to_json(const DaemonConfig& cfg);

struct BindAddress {
  std::string host;
  int port = 0;
};

/// "host:port" with port in 0..65535. Throws ConfigError.
BindAddress parse_bind(const std::string& bind);

std::vector<sim::ScenarioEvent> load_scenario_file(const std::filesystem::path& path);

class Daemon {
 public:
  /// Loads cfg.scenario if set and `scenario` is empty.
  explicit Daemon(DaemonConfig cfg, std::vector<sim::ScenarioEvent> scenario = {});
  ~Daemon();

  Daemon(const Daemon&) = delete;
  Daemon& operator=(const Daemon&) = delete;

  /// Ticks every poll interval until the clock reaches `until_ms`, then steps
  /// the remainder without a tick. Not for use after start().
  void run_until(std::uint64_t until_ms);

  /// Runs one tick (advancing the sim world first). Single-threaded use only.
  std::vector<EventRecord> tick();

  /// Starts the control loop. `period` is the wall time between ticks; the
  /// sim clock still advances by the configured poll interval per tick.
  void start(std::chrono::milliseconds period);
  void stop();
  bool running() const { return running_.load(); }

  /// Thread-safe command submission, answered by the control loop.
  std::future<Response> submit(Command c);
  Response call(Command c, std::chrono::milliseconds timeout = std::chrono::seconds(5));

  /// Handles a command directly. Single-threaded use only.
  Response handle(const Command& c);

  /// Set when the control loop stopped on a fatal error.
  std::optional<std::string> failure() const;

  EventLog& log() { return *log_; }
  const DaemonConfig& config() const { return cfg_; }
  Controller& controller() { return *controller_; }
  sim::SimWorld* world() { return world_.get(); }
  sim::SimBackend* sim_backend() { return sim_backend_; }
  std::uint64_t now_ms() const;

 private:
  struct Pending {
    Command command;
    std::promise<Response> reply;
  };

  void loop(std::chrono::milliseconds period);
  void drain_commands();
  void fail(const std::string& why);

  DaemonConfig cfg_;
  std::unique_ptr<sim::SimWorld> world_;
  std::unique_ptr<HalBackend> backend_;
  sim::SimBackend* sim_backend_ = nullptr;
  std::unique_ptr<EventLog> log_;
  std::unique_ptr<Controller> controller_;
  std::uint64_t virtual_clock_ms_ = 0;

  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Pending> inbox_;
  std::optional<std::string> failure_;
  bool stop_requested_ = false;
  std::atomic<bool> running_{false};
  std::thread thread_;
};

}  // namespace autohouse
