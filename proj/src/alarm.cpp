#include "autohouse/alarm.hpp"

#include <limits>

namespace autohouse {

std::string_view to_string(AlarmMode mode) {
  switch (mode) {
    case AlarmMode::Disarmed: return "Disarmed";
    case AlarmMode::Armed: return "Armed";
    case AlarmMode::Triggered: return "Triggered";
  }
  return "?";
}

std::string_view to_string(AlarmCommand cmd) {
  switch (cmd) {
    case AlarmCommand::None: return "None";
    case AlarmCommand::Arm: return "Arm";
    case AlarmCommand::Disarm: return "Disarm";
    case AlarmCommand::Reset: return "Reset";
  }
  return "?";
}

std::pair<Debouncer, bool> debounce(const Debouncer& d, bool raw) {
  Debouncer next = d;
  if (!raw) {
    next.run_length = 0;
  } else if (next.run_length < std::numeric_limits<std::uint32_t>::max()) {
    ++next.run_length;
  }
  return {next, next.stable()};
}

bool command_applies(AlarmMode mode, AlarmCommand cmd) {
  switch (cmd) {
    case AlarmCommand::Arm: return mode == AlarmMode::Disarmed;
    case AlarmCommand::Disarm: return mode == AlarmMode::Armed;
    case AlarmCommand::Reset: return mode == AlarmMode::Triggered;
    case AlarmCommand::None: return false;
  }
  return false;
}

AlarmMode mode_after(AlarmMode mode, AlarmCommand cmd) {
  if (!command_applies(mode, cmd)) return mode;
  return cmd == AlarmCommand::Arm ? AlarmMode::Armed : AlarmMode::Disarmed;
}

AlarmStep step(const AlarmState& s, bool disturbance, AlarmCommand cmd, std::string_view sensor_id) {
  AlarmStep out{s, {}};

  if (cmd != AlarmCommand::None) {
    if (command_applies(s.mode, cmd)) {
      out.state.mode = mode_after(s.mode, cmd);
      if (cmd == AlarmCommand::Reset) out.actions.emplace_back(action::SirenOff{});
      return out;
    }
    // Only Reset leaves Triggered.
    const bool latched = s.mode == AlarmMode::Triggered && cmd != AlarmCommand::Reset;
    out.actions.emplace_back(
        action::LogOnly{std::string(latched ? kReasonResetRequired : kReasonRedundant)});
  }

  if (!disturbance) return out;

  switch (s.mode) {
    case AlarmMode::Armed:
      out.state.mode = AlarmMode::Triggered;
      ++out.state.episode;
      out.actions.emplace_back(action::RaiseAlert{std::string(sensor_id), out.state.episode});
      out.actions.emplace_back(action::AllLightsOn{});
      out.actions.emplace_back(action::SirenOn{});
      break;
    case AlarmMode::Disarmed:
      out.actions.emplace_back(action::LogOnly{std::string(kReasonDisarmedDisturbance)});
      break;
    case AlarmMode::Triggered:
      break;
  }
  return out;
}

}  // namespace autohouse
