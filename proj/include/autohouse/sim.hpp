#pragma once

// autohouse/sim.hpp
//
// Deterministic virtual hardware behind the HAL: relay card, IR sensors and a
// scripted millisecond clock. Time only moves through step(); nothing here
// reads the wall clock or a random source, so a world, a scenario and a call
// sequence always reproduce the same trace.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "autohouse/card.hpp"
#include "autohouse/house.hpp"
#include "autohouse/port.hpp"

namespace autohouse::sim {

struct IrDisturbance {
  std::string sensor_id;
  std::uint64_t duration_ms = 0;
  bool operator==(const IrDisturbance&) const = default;
};
struct PowerLoss {
  bool operator==(const PowerLoss&) const = default;
};
struct PowerRestore {
  bool operator==(const PowerRestore&) const = default;
};
/// Holds a status or control line at a fixed level until released.
struct LineStuck {
  LineName line = LineName::Ack;
  Level level = Level::Low;
  bool operator==(const LineStuck&) const = default;
};
struct LineRelease {
  LineName line = LineName::Ack;
  bool operator==(const LineRelease&) const = default;
};

using EventKind = std::variant<IrDisturbance, PowerLoss, PowerRestore, LineStuck, LineRelease>;

struct ScenarioEvent {
  std::uint64_t t_ms = 0;
  EventKind kind;
  bool operator==(const ScenarioEvent&) const = default;
};

std::string_view kind_name(const EventKind& kind);

class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(std::optional<std::size_t> index, const std::string& what);
  /// Offending entry, if the problem is inside one.
  std::optional<std::size_t> index() const { return index_; }

 private:
  std::optional<std::size_t> index_;
};

nlohmann::json event_to_json(const ScenarioEvent& e);

/// Parses one event object. When `default_t_ms` is set, t_ms may be omitted.
/// Throws ScenarioError (without an index).
ScenarioEvent event_from_json(const nlohmann::json& obj, std::optional<std::uint64_t> default_t_ms = std::nullopt);

/// Parses a JSON array of events and returns them stably sorted by t_ms.
std::vector<ScenarioEvent> load_scenario(std::string_view text);

struct SimWorld {
  std::uint64_t clock_ms = 0;
  CardState card = powered_card();
  PortRegisters regs;
  LineLevels levels;
  std::map<std::string, LineName, std::less<>> sensor_lines;
  std::map<std::string, std::uint64_t, std::less<>> sensor_active_until_ms;
  std::map<LineName, Level> stuck_lines;
  std::vector<ScenarioEvent> pending;
  std::uint64_t applied_count = 0;
  std::vector<std::string> warnings;

  bool sensor_active(std::string_view sensor_id) const;

  bool operator==(const SimWorld&) const = default;
};

/// Powered card, nothing latched, control register 0, sensors from `house`.
SimWorld make_world(const HouseConfig& house, const std::vector<ScenarioEvent>& scenario = {});

/// Advances the clock by dt_ms (> 0, else std::invalid_argument), applying
/// every pending event due at or before the new clock in order.
SimWorld step(const SimWorld& w, std::uint64_t dt_ms);

/// Queues an event behind any already pending at the same time. Events dated
/// before the clock are moved to the current clock with a warning.
SimWorld inject(const SimWorld& w, ScenarioEvent e);

SimWorld hal_write_data(const SimWorld& w, std::uint8_t value);
std::uint8_t hal_read_status(const SimWorld& w);
SimWorld hal_write_control(const SimWorld& w, std::uint8_t value);

/// HAL adapter over a world owned elsewhere. Records every call so tests can
/// check ordering.
class SimBackend final : public HalBackend {
 public:
  enum class Op : std::uint8_t { WriteData, ReadStatus, WriteControl };
  struct Call {
    Op op;
    std::uint8_t value;
    std::uint64_t clock_ms;
    bool operator==(const Call&) const = default;
  };

  explicit SimBackend(SimWorld& world) : world_(world) {}

  void write_data(std::uint8_t value) override;
  std::uint8_t read_status() override;
  void write_control(std::uint8_t value) override;
  bool is_simulator() const override { return true; }

  SimWorld& world() { return world_; }
  const std::vector<Call>& trace() const { return trace_; }
  void clear_trace() { trace_.clear(); }

 private:
  SimWorld& world_;
  std::vector<Call> trace_;
};

}  // namespace autohouse::sim
