#include "autohouse/sim.hpp"

#include <algorithm>
#include <cstdio>

#include "json_fields.hpp"

namespace autohouse::sim {

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

void recompute_levels(SimWorld& w) {
  w.levels = write_data(w.regs, w.levels, w.regs.data).levels;
  w.levels = write_control(w.regs, w.levels, w.regs.control).levels;
  for (auto line : kStatusLines) w.levels.set(line, Level::Low);
  for (const auto& [id, line] : w.sensor_lines) {
    if (w.sensor_active(id)) w.levels.set(line, Level::High);
  }
  for (const auto& [line, level] : w.stuck_lines) w.levels.set(line, level);
  w.regs.status = encode_status(w.levels);
}

void apply_event(SimWorld& w, const ScenarioEvent& e) {
  std::visit(overloaded{
                 [&](const IrDisturbance& ev) {
                   if (!w.sensor_lines.count(ev.sensor_id)) {
                     w.warnings.push_back("IrDisturbance for unknown sensor '" + ev.sensor_id + "' ignored");
                     return;
                   }
                   auto& until = w.sensor_active_until_ms[ev.sensor_id];
                   until = std::max(until, e.t_ms + ev.duration_ms);
                 },
                 [&](const PowerLoss&) { w.card = set_power(w.card, false); },
                 [&](const PowerRestore&) { w.card = set_power(w.card, true); },
                 [&](const LineStuck& ev) { w.stuck_lines[ev.line] = ev.level; },
                 [&](const LineRelease& ev) { w.stuck_lines.erase(ev.line); },
             },
             e.kind);
  ++w.applied_count;
}

void insert_pending(std::vector<ScenarioEvent>& pending, ScenarioEvent e) {
  auto pos = std::upper_bound(pending.begin(), pending.end(), e.t_ms,
                              [](std::uint64_t t, const ScenarioEvent& p) { return t < p.t_ms; });
  pending.insert(pos, std::move(e));
}

std::uint64_t read_u64(detail::FieldReader& r, std::string_view key, const nlohmann::json* v, bool& ok) {
  long long out = 0;
  if (!r.integer(v, key, out)) {
    ok = false;
    return 0;
  }
  if (out < 0) {
    r.fail("field '" + std::string(key) + "' must be non-negative");
    ok = false;
    return 0;
  }
  return static_cast<std::uint64_t>(out);
}

LineName read_stuckable_line(detail::FieldReader& r, bool& ok) {
  std::string text;
  if (!r.string(r.required("line"), "line", text)) {
    ok = false;
    return LineName::Ack;
  }
  auto line = line_from_string(text);
  if (!line) {
    r.fail("unknown line '" + text + "'");
    ok = false;
    return LineName::Ack;
  }
  if (group_of(*line) == LineGroup::Data) {
    r.fail("line '" + text + "' is a data output and cannot be forced");
    ok = false;
  }
  return *line;
}

}  // namespace

std::string_view kind_name(const EventKind& kind) {
  return std::visit(overloaded{
                        [](const IrDisturbance&) { return std::string_view("IrDisturbance"); },
                        [](const PowerLoss&) { return std::string_view("PowerLoss"); },
                        [](const PowerRestore&) { return std::string_view("PowerRestore"); },
                        [](const LineStuck&) { return std::string_view("LineStuck"); },
                        [](const LineRelease&) { return std::string_view("LineRelease"); },
                    },
                    kind);
}

ScenarioError::ScenarioError(std::optional<std::size_t> index, const std::string& what)
    : std::runtime_error(index ? "scenario entry " + std::to_string(*index) + ": " + what : "scenario: " + what),
      index_(index) {}

nlohmann::json event_to_json(const ScenarioEvent& e) {
  nlohmann::json out{{"t_ms", e.t_ms}, {"kind", kind_name(e.kind)}};
  std::visit(overloaded{
                 [&](const IrDisturbance& ev) {
                   out["sensor_id"] = ev.sensor_id;
                   out["duration_ms"] = ev.duration_ms;
                 },
                 [](const PowerLoss&) {},
                 [](const PowerRestore&) {},
                 [&](const LineStuck& ev) {
                   out["line"] = to_string(ev.line);
                   out["level"] = to_string(ev.level);
                 },
                 [&](const LineRelease& ev) { out["line"] = to_string(ev.line); },
             },
             e.kind);
  return out;
}

ScenarioEvent event_from_json(const nlohmann::json& obj, std::optional<std::uint64_t> default_t_ms) {
  std::vector<std::string> errors;
  detail::FieldReader r(obj, "", errors);
  ScenarioEvent e;
  bool ok = r.ok();

  if (ok) {
    const auto* t = default_t_ms ? r.optional("t_ms") : r.required("t_ms");
    if (t != nullptr) {
      e.t_ms = read_u64(r, "t_ms", t, ok);
    } else if (default_t_ms) {
      e.t_ms = *default_t_ms;
    } else {
      ok = false;
    }

    std::string kind;
    if (!r.string(r.required("kind"), "kind", kind)) {
      ok = false;
    } else if (kind == "IrDisturbance") {
      IrDisturbance ev;
      if (!r.string(r.required("sensor_id"), "sensor_id", ev.sensor_id)) ok = false;
      ev.duration_ms = read_u64(r, "duration_ms", r.required("duration_ms"), ok);
      if (ok && ev.duration_ms == 0) {
        r.fail("duration_ms must be positive");
        ok = false;
      }
      e.kind = std::move(ev);
    } else if (kind == "PowerLoss") {
      e.kind = PowerLoss{};
    } else if (kind == "PowerRestore") {
      e.kind = PowerRestore{};
    } else if (kind == "LineStuck") {
      LineStuck ev;
      ev.line = read_stuckable_line(r, ok);
      std::string level;
      if (!r.string(r.required("level"), "level", level)) {
        ok = false;
      } else if (auto l = level_from_string(level)) {
        ev.level = *l;
      } else {
        r.fail("unknown level '" + level + "'");
        ok = false;
      }
      e.kind = ev;
    } else if (kind == "LineRelease") {
      e.kind = LineRelease{read_stuckable_line(r, ok)};
    } else {
      r.fail("unknown kind '" + kind + "'");
      ok = false;
    }
    r.reject_unknown();
  }

  if (!errors.empty()) {
    std::string msg;
    for (const auto& err : errors) msg += (msg.empty() ? "" : "; ") + err;
    throw ScenarioError(std::nullopt, msg);
  }
  if (!ok) throw ScenarioError(std::nullopt, "invalid event");
  return e;
}

std::vector<ScenarioEvent> load_scenario(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& err) {
    throw ScenarioError(std::nullopt, std::string("malformed document: ") + err.what());
  }
  if (!doc.is_array()) throw ScenarioError(std::nullopt, "document must be a JSON array");

  std::vector<ScenarioEvent> events;
  events.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    try {
      events.push_back(event_from_json(doc[i]));
    } catch (const ScenarioError& err) {
      std::string what = err.what();
      const std::string prefix = "scenario: ";
      if (what.rfind(prefix, 0) == 0) what.erase(0, prefix.size());
      throw ScenarioError(i, what);
    }
  }
  std::stable_sort(events.begin(), events.end(),
                   [](const ScenarioEvent& a, const ScenarioEvent& b) { return a.t_ms < b.t_ms; });
  return events;
}

bool SimWorld::sensor_active(std::string_view sensor_id) const {
  auto it = sensor_active_until_ms.find(sensor_id);
  return it != sensor_active_until_ms.end() && clock_ms < it->second;
}

SimWorld make_world(const HouseConfig& house, const std::vector<ScenarioEvent>& scenario) {
  SimWorld w;
  for (const auto& s : house.sensors) w.sensor_lines.emplace(s.sensor_id, s.line);
  for (const auto& e : scenario) insert_pending(w.pending, e);
  recompute_levels(w);
  return w;
}

SimWorld step(const SimWorld& w, std::uint64_t dt_ms) {
  if (dt_ms == 0) throw std::invalid_argument("sim step requires dt_ms > 0");
  SimWorld next = w;
  next.clock_ms += dt_ms;

  auto due = next.pending.begin();
  while (due != next.pending.end() && due->t_ms <= next.clock_ms) {
    apply_event(next, *due);
    ++due;
  }
  next.pending.erase(next.pending.begin(), due);

  std::erase_if(next.sensor_active_until_ms, [&](const auto& kv) { return kv.second <= next.clock_ms; });
  recompute_levels(next);
  return next;
}

SimWorld inject(const SimWorld& w, ScenarioEvent e) {
  SimWorld next = w;
  if (e.t_ms < next.clock_ms) {
    next.warnings.push_back(std::string(kind_name(e.kind)) + " dated t=" + std::to_string(e.t_ms) +
                            " clamped to t=" + std::to_string(next.clock_ms));
    e.t_ms = next.clock_ms;
  }
  insert_pending(next.pending, std::move(e));
  return next;
}

SimWorld hal_write_data(const SimWorld& w, std::uint8_t value) {
  SimWorld next = w;
  next.regs = write_data(next.regs, next.levels, value).regs;
  next.card = apply_data(next.card, value);
  recompute_levels(next);
  return next;
}

std::uint8_t hal_read_status(const SimWorld& w) { return encode_status(w.levels); }

SimWorld hal_write_control(const SimWorld& w, std::uint8_t value) {
  SimWorld next = w;
  const auto update = write_control(next.regs, next.levels, value);
  if (update.masked) {
    next.warnings.push_back("control write " + hex_byte(value) + " masked to " + hex_byte(update.regs.control));
  }
  next.regs = update.regs;
  recompute_levels(next);
  return next;
}

void SimBackend::write_data(std::uint8_t value) {
  trace_.push_back({Op::WriteData, value, world_.clock_ms});
  world_ = hal_write_data(world_, value);
}

std::uint8_t SimBackend::read_status() {
  const auto value = hal_read_status(world_);
  trace_.push_back({Op::ReadStatus, value, world_.clock_ms});
  return value;
}

void SimBackend::write_control(std::uint8_t value) {
  trace_.push_back({Op::WriteControl, value, world_.clock_ms});
  world_ = hal_write_control(world_, value);
}

}  // namespace autohouse::sim
