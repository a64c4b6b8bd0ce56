#pragma once

// autohouse/controller.hpp
//
// The poll -> debounce -> alarm -> actuate loop. One Controller owns the
// daemon state and talks to the card only through a HalBackend. Each
// poll_tick():
//
//   1. reads and decodes the status register
//   2. debounces every bound sensor (SensorRaw on raw edges)
//   3. steps the alarm with at most one queued operator command
//   4. turns alarm actions into override/siren state and Alert/Warning events
//   5. writes the composed data byte if it differs from the last one written
//
// Operator alarm commands are queued and consumed one per tick. Commands that
// would not change the projected mode are answered "no-op" at once.

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "autohouse/alarm.hpp"
#include "autohouse/event_log.hpp"
#include "autohouse/house.hpp"
#include "autohouse/port.hpp"
#include "autohouse/sim.hpp"

namespace autohouse {

namespace command {
struct SetLight {
  std::string zone_id;
  bool on = false;
};
struct Arm {};
struct Disarm {};
struct Reset {};
struct GetState {};
struct Inject {
  sim::ScenarioEvent event;
  bool at_now = false;  // ignore event.t_ms and use the current sim clock
};
}  // namespace command

using Command = std::variant<command::SetLight, command::Arm, command::Disarm, command::Reset, command::GetState,
                             command::Inject>;

std::string_view command_name(const Command& c);
nlohmann::json command_to_json(const Command& c);

enum class ResponseStatus : std::uint8_t { Ok, NoOp, NotFound, Unsupported, BadRequest };

std::string_view to_string(ResponseStatus status);

struct Response {
  ResponseStatus status = ResponseStatus::Ok;
  std::string message;
  nlohmann::json body = nlohmann::json::object();
};

struct DaemonState {
  AlarmState alarm;
  std::map<std::string, Debouncer, std::less<>> debouncers;
  std::map<std::string, bool, std::less<>> raw_levels;
  LightMap desired_lights;
  bool siren = false;
  bool forced_all_on = false;
  std::uint8_t last_status_byte = 0x80;
  std::uint8_t last_written = 0x00;  // the card comes up with nothing latched
  std::uint64_t tick_count = 0;
  std::deque<AlarmCommand> pending;
  int consecutive_failures = 0;
};

/// Thrown by poll_tick after too many consecutive HAL failures.
class DaemonFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kMaxConsecutiveHalFailures = 3;

class Controller {
 public:
  using Clock = std::function<std::uint64_t()>;

  /// `cfg` must validate. `world` is the simulated hardware behind `hal`, or
  /// nullptr for a physical backend; it enables Inject and power reporting.
  Controller(HouseConfig cfg, HalBackend& hal, EventLog& log, Clock clock, bool arm_on_start,
             sim::SimWorld* world = nullptr);

  /// Runs one poll cycle and returns the events it produced.
  std::vector<EventRecord> poll_tick();

  Response handle_command(const Command& c);

  /// Full snapshot: zones, lines, card, alarm, tick.
  nlohmann::json snapshot() const;

  /// The byte the card should hold right now.
  std::uint8_t target_byte() const;

  const DaemonState& state() const { return state_; }
  const HouseConfig& config() const { return cfg_; }
  bool simulated() const { return world_ != nullptr; }

 private:
  EventRecord emit(EventKind kind, nlohmann::json payload, std::vector<EventRecord>* sink = nullptr);
  void sync_simulator(std::vector<EventRecord>* sink);
  bool hal_failed(const std::string& op, const std::exception& err, std::vector<EventRecord>& sink);
  Response queue_alarm_command(AlarmCommand cmd, const Command& c);

  HouseConfig cfg_;
  HalBackend& hal_;
  EventLog& log_;
  Clock clock_;
  sim::SimWorld* world_;
  std::optional<bool> last_powered_;
  DaemonState state_;
};

}  // namespace autohouse
