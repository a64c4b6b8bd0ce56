#pragma once

// autohouse/alarm.hpp
//
// Latching intrusion alarm. Pure transition function over value types; the
// controller feeds it one debounced disturbance flag and at most one operator
// command per poll.
//
//   Disarmed --Arm--> Armed --disturbance--> Triggered --Reset--> Disarmed
//                     Armed --Disarm-------> Disarmed
//
// A command that changes the mode consumes the step: a disturbance seen in the
// same step is not evaluated. Commands that do not apply to the current mode
// are reported as LogOnly and the disturbance is then evaluated as usual.

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace autohouse {

enum class AlarmMode : std::uint8_t { Disarmed, Armed, Triggered };

std::string_view to_string(AlarmMode mode);

struct AlarmState {
  AlarmMode mode = AlarmMode::Disarmed;
  std::uint32_t episode = 0;

  bool operator==(const AlarmState&) const = default;
};

struct Debouncer {
  std::uint32_t threshold = 2;
  std::uint32_t run_length = 0;

  bool stable() const { return run_length >= threshold; }

  bool operator==(const Debouncer&) const = default;
};

/// Counts consecutive asserted samples; any clear sample resets the run.
std::pair<Debouncer, bool> debounce(const Debouncer& d, bool raw);

namespace action {
struct RaiseAlert {
  std::string sensor_id;
  std::uint32_t episode = 0;
  bool operator==(const RaiseAlert&) const = default;
};
struct AllLightsOn {
  bool operator==(const AllLightsOn&) const = default;
};
struct SirenOn {
  bool operator==(const SirenOn&) const = default;
};
struct SirenOff {
  bool operator==(const SirenOff&) const = default;
};
struct LogOnly {
  std::string reason;
  bool operator==(const LogOnly&) const = default;
};
}  // namespace action

using AlarmAction = std::variant<action::RaiseAlert, action::AllLightsOn, action::SirenOn, action::SirenOff,
                                 action::LogOnly>;

enum class AlarmCommand : std::uint8_t { None, Arm, Disarm, Reset };

std::string_view to_string(AlarmCommand cmd);

inline constexpr std::string_view kReasonRedundant = "redundant";
inline constexpr std::string_view kReasonResetRequired = "reset required";
inline constexpr std::string_view kReasonDisarmedDisturbance = "disturbance while disarmed";

struct AlarmStep {
  AlarmState state;
  std::vector<AlarmAction> actions;
};

/// `sensor_id` names the sensor reported in RaiseAlert when a disturbance
/// triggers the alarm.
AlarmStep step(const AlarmState& s, bool disturbance, AlarmCommand cmd, std::string_view sensor_id = {});

/// True if `cmd` would change the mode from `mode`.
bool command_applies(AlarmMode mode, AlarmCommand cmd);

/// The mode after `cmd` is applied from `mode` with no disturbance.
AlarmMode mode_after(AlarmMode mode, AlarmCommand cmd);

}  // namespace autohouse
