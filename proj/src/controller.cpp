#include "autohouse/controller.hpp"

#include <cstdio>

namespace autohouse {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string hex_byte(std::uint8_t value) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "0x%02X", value);
  return buf;
}

Response reply(ResponseStatus status, std::string message) { return Response{status, std::move(message), {}}; }

}  // namespace

std::string_view command_name(const Command& c) {
  return std::visit(overloaded{
                        [](const command::SetLight&) { return std::string_view("SetLight"); },
                        [](const command::Arm&) { return std::string_view("Arm"); },
                        [](const command::Disarm&) { return std::string_view("Disarm"); },
                        [](const command::Reset&) { return std::string_view("Reset"); },
                        [](const command::GetState&) { return std::string_view("GetState"); },
                        [](const command::Inject&) { return std::string_view("Inject"); },
                    },
                    c);
}

nlohmann::json command_to_json(const Command& c) {
  nlohmann::json out{{"command", command_name(c)}};
  if (const auto* set = std::get_if<command::SetLight>(&c)) {
    out["zone_id"] = set->zone_id;
    out["on"] = set->on;
  } else if (const auto* inj = std::get_if<command::Inject>(&c)) {
    out["event"] = sim::event_to_json(inj->event);
  }
  return out;
}

std::string_view to_string(ResponseStatus status) {
  switch (status) {
    case ResponseStatus::Ok: return "ok";
    case ResponseStatus::NoOp: return "no-op";
    case ResponseStatus::NotFound: return "not-found";
    case ResponseStatus::Unsupported: return "unsupported";
    case ResponseStatus::BadRequest: return "bad-request";
  }
  return "?";
}

Controller::Controller(HouseConfig cfg, HalBackend& hal, EventLog& log, Clock clock, bool arm_on_start,
                       sim::SimWorld* world)
    : cfg_(std::move(cfg)), hal_(hal), log_(log), clock_(std::move(clock)), world_(world) {
  if (auto violations = validate_config(cfg_); !violations.empty()) throw ConfigError(std::move(violations));
  for (const auto& z : cfg_.zones) state_.desired_lights[z.id] = false;
  for (const auto& s : cfg_.sensors) {
    state_.debouncers[s.sensor_id] = Debouncer{static_cast<std::uint32_t>(cfg_.debounce_samples), 0};
    state_.raw_levels[s.sensor_id] = false;
  }
  state_.alarm.mode = arm_on_start ? AlarmMode::Armed : AlarmMode::Disarmed;
  if (world_ != nullptr) last_powered_ = world_->card.powered;
}

EventRecord Controller::emit(EventKind kind, nlohmann::json payload, std::vector<EventRecord>* sink) {
  auto record = log_.append(clock_(), kind, std::move(payload));
  if (sink != nullptr) sink->push_back(record);
  return record;
}

void Controller::sync_simulator(std::vector<EventRecord>* sink) {
  if (world_ == nullptr) return;
  for (auto& w : world_->warnings) emit(EventKind::Warning, {{"source", "sim"}, {"reason", w}}, sink);
  world_->warnings.clear();
  if (last_powered_ != world_->card.powered) {
    last_powered_ = world_->card.powered;
    emit(EventKind::PowerChange,
         {{"powered", world_->card.powered},
          {"dc_rail_volts", world_->card.dc_rail_volts},
          {"latched_data", world_->card.latched_data}},
         sink);
  }
}

bool Controller::hal_failed(const std::string& op, const std::exception& err, std::vector<EventRecord>& sink) {
  ++state_.consecutive_failures;
  emit(EventKind::Warning,
       {{"source", "hal"},
        {"reason", op + " failed: " + err.what()},
        {"consecutive_failures", state_.consecutive_failures}},
       &sink);
  if (state_.consecutive_failures >= kMaxConsecutiveHalFailures) {
    throw DaemonFailure(std::to_string(state_.consecutive_failures) + " consecutive HAL failures, last: " +
                        err.what());
  }
  return false;
}

std::uint8_t Controller::target_byte() const {
  if (state_.forced_all_on) return 0xFF;
  return compose_data_byte(cfg_, state_.desired_lights, state_.siren);
}

std::vector<EventRecord> Controller::poll_tick() {
  std::vector<EventRecord> events;
  sync_simulator(&events);

  // 1. status
  std::uint8_t status = 0;
  LineLevels levels;
  try {
    status = hal_.read_status();
    levels = decode_status(status);
  } catch (const HalError& err) {
    hal_failed("read_status", err, events);
    return events;
  } catch (const MalformedStatus& err) {
    hal_failed("read_status", err, events);
    return events;
  }
  state_.last_status_byte = status;

  // 2. sensors
  bool any_stable = false;
  bool any_rising = false;
  std::string trigger_sensor;
  for (const auto& s : cfg_.sensors) {
    const bool raw = levels.high(s.line);
    auto& prev_raw = state_.raw_levels[s.sensor_id];
    if (raw != prev_raw) {
      prev_raw = raw;
      emit(EventKind::SensorRaw,
           {{"sensor_id", s.sensor_id}, {"line", to_string(s.line)}, {"level", to_string(raw ? Level::High : Level::Low)}},
           &events);
    }
    auto& deb = state_.debouncers[s.sensor_id];
    const bool was_stable = deb.stable();
    auto [next, stable] = debounce(deb, raw);
    deb = next;
    if (stable) {
      if (!any_stable) trigger_sensor = s.sensor_id;
      any_stable = true;
      any_rising = any_rising || !was_stable;
    }
  }

  // 3. alarm. A held disturbance keeps reporting while armed; while disarmed
  // only its onset is logged.
  AlarmCommand cmd = AlarmCommand::None;
  if (!state_.pending.empty()) {
    cmd = state_.pending.front();
    state_.pending.pop_front();
  }
  const bool disturbance = any_stable && (any_rising || state_.alarm.mode != AlarmMode::Disarmed);
  const auto before = state_.alarm;
  auto result = step(before, disturbance, cmd, trigger_sensor);
  state_.alarm = result.state;
  if (result.state.mode != before.mode) {
    emit(EventKind::AlarmTransition,
         {{"from", to_string(before.mode)},
          {"to", to_string(result.state.mode)},
          {"episode", result.state.episode},
          {"cause", cmd != AlarmCommand::None ? std::string(to_string(cmd)) : std::string("disturbance")}},
         &events);
  }

  // 4. actions
  for (const auto& a : result.actions) {
    std::visit(overloaded{
                   [&](const action::RaiseAlert& alert) {
                     emit(EventKind::Alert, {{"sensor_id", alert.sensor_id}, {"episode", alert.episode}}, &events);
                   },
                   [&](const action::AllLightsOn&) { state_.forced_all_on = true; },
                   [&](const action::SirenOn&) { state_.siren = true; },
                   [&](const action::SirenOff&) { state_.siren = false; },
                   [&](const action::LogOnly& log) {
                     nlohmann::json payload{{"source", "alarm"}, {"reason", log.reason}};
                     if (cmd != AlarmCommand::None) payload["command"] = to_string(cmd);
                     if (log.reason == kReasonDisarmedDisturbance) payload["sensor_id"] = trigger_sensor;
                     emit(EventKind::Warning, std::move(payload), &events);
                   },
               },
               a);
  }
  state_.forced_all_on = state_.alarm.mode == AlarmMode::Triggered;

  // 5. actuate
  const auto byte = target_byte();
  if (byte != state_.last_written) {
    try {
      hal_.write_data(byte);
    } catch (const HalError& err) {
      hal_failed("write_data", err, events);
      return events;
    }
    state_.last_written = byte;
    emit(EventKind::DataWrite, {{"value", byte}, {"hex", hex_byte(byte)}, {"forced", state_.forced_all_on}},
         &events);
  }

  state_.consecutive_failures = 0;
  ++state_.tick_count;
  return events;
}

Response Controller::queue_alarm_command(AlarmCommand cmd, const Command& c) {
  auto projected = state_.alarm.mode;
  for (auto queued : state_.pending) projected = mode_after(projected, queued);

  auto payload = command_to_json(c);
  if (!command_applies(projected, cmd)) {
    const bool latched = projected == AlarmMode::Triggered && cmd != AlarmCommand::Reset;
    const std::string reason(latched ? kReasonResetRequired : kReasonRedundant);
    payload["result"] = "no-op";
    emit(EventKind::Command, std::move(payload));
    emit(EventKind::Warning, {{"source", "command"}, {"reason", reason}, {"command", to_string(cmd)}});
    return reply(ResponseStatus::NoOp, reason + ": alarm is " + std::string(to_string(projected)));
  }
  state_.pending.push_back(cmd);
  payload["result"] = "queued";
  emit(EventKind::Command, std::move(payload));
  return reply(ResponseStatus::Ok, "queued");
}

Response Controller::handle_command(const Command& c) {
  return std::visit(
      overloaded{
          [&](const command::SetLight& set) -> Response {
            auto it = state_.desired_lights.find(set.zone_id);
            if (it == state_.desired_lights.end()) {
              return reply(ResponseStatus::NotFound, "zone '" + set.zone_id + "' not found");
            }
            auto payload = command_to_json(c);
            if (it->second == set.on) {
              payload["result"] = "no-op";
              emit(EventKind::Command, std::move(payload));
              return reply(ResponseStatus::NoOp, "zone '" + set.zone_id + "' already " + (set.on ? "on" : "off"));
            }
            it->second = set.on;
            payload["result"] = "ok";
            emit(EventKind::Command, std::move(payload));
            return reply(ResponseStatus::Ok, "zone '" + set.zone_id + "' " + (set.on ? "on" : "off"));
          },
          [&](const command::Arm&) { return queue_alarm_command(AlarmCommand::Arm, c); },
          [&](const command::Disarm&) { return queue_alarm_command(AlarmCommand::Disarm, c); },
          [&](const command::Reset&) { return queue_alarm_command(AlarmCommand::Reset, c); },
          [&](const command::GetState&) {
            Response r = reply(ResponseStatus::Ok, "state");
            r.body = snapshot();
            return r;
          },
          [&](const command::Inject& inj) -> Response {
            if (world_ == nullptr) return reply(ResponseStatus::Unsupported, "inject requires the simulator backend");
            auto event = inj.event;
            if (inj.at_now) event.t_ms = world_->clock_ms;
            *world_ = sim::inject(*world_, event);
            auto payload = command_to_json(c);
            payload["result"] = "ok";
            emit(EventKind::Command, std::move(payload));
            sync_simulator(nullptr);
            return reply(ResponseStatus::Ok, "injected " + std::string(sim::kind_name(inj.event.kind)));
          },
      },
      c);
}

nlohmann::json Controller::snapshot() const {
  nlohmann::json zones = nlohmann::json::array();
  const std::uint8_t relays = world_ != nullptr ? world_->card.energized_mask() : state_.last_written;
  for (const auto& z : cfg_.zones) {
    const bool t2 = (relays >> z.channel) & 1U;
    zones.push_back({{"id", z.id},
                     {"name", z.name},
                     {"kind", to_string(z.kind)},
                     {"layer", to_string(z.layer)},
                     {"channel", z.channel},
                     {"on", state_.desired_lights.at(z.id)},
                     {"relay", t2 ? "T2" : "T1"},
                     {"led", t2}});
  }
  nlohmann::json sensors = nlohmann::json::array();
  for (const auto& s : cfg_.sensors) {
    sensors.push_back({{"sensor_id", s.sensor_id},
                       {"line", to_string(s.line)},
                       {"raw", state_.raw_levels.at(s.sensor_id)},
                       {"stable", state_.debouncers.at(s.sensor_id).stable()}});
  }
  nlohmann::json pending = nlohmann::json::array();
  for (auto c : state_.pending) pending.push_back(to_string(c));

  nlohmann::json card = nullptr;
  if (world_ != nullptr) {
    card = {{"powered", world_->card.powered},
            {"dc_rail_volts", world_->card.dc_rail_volts},
            {"latched_data", world_->card.latched_data}};
  }

  return {{"tick", state_.tick_count},
          {"ts_ms", clock_()},
          {"backend", world_ != nullptr ? "sim" : "parport"},
          {"alarm", {{"mode", to_string(state_.alarm.mode)}, {"episode", state_.alarm.episode}, {"pending", pending}}},
          {"siren", state_.siren},
          {"forced_all_on", state_.forced_all_on},
          {"status_byte", state_.last_status_byte},
          {"data_byte", state_.last_written},
          {"zones", zones},
          {"sensors", sensors},
          {"card", card}};
}

}  // namespace autohouse
