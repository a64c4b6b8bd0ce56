#include "autohouse/house.hpp"

#include <algorithm>
#include <cstdint>
#include <set>

#include "json_fields.hpp"

namespace autohouse {

namespace {

constexpr int kMaxChannel = 7;

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += "; ";
    out += p;
  }
  return out;
}

template <typename Enum, std::size_t N>
std::optional<Enum> enum_from(std::string_view name, const std::array<Enum, N>& values) {
  for (auto v : values) {
    if (to_string(v) == name) return v;
  }
  return std::nullopt;
}

constexpr std::array kZoneKinds{ZoneKind::Room, ZoneKind::Lobby};
constexpr std::array kLayers{Layer::External, Layer::Internal, Layer::DeepInternal};
constexpr std::array kTechnologies{SensorTechnology::Infrared};

template <typename Enum, std::size_t N>
bool read_enum(detail::FieldReader& r, std::string_view key, const std::array<Enum, N>& values, Enum& out) {
  std::string text;
  if (!r.string(r.required(key), key, text)) return false;
  if (auto v = enum_from(text, values)) {
    out = *v;
    return true;
  }
  r.fail("field '" + std::string(key) + "' has unknown value '" + text + "'");
  return false;
}

bool read_int(detail::FieldReader& r, std::string_view key, int& out) {
  long long v = 0;
  if (!r.integer(r.required(key), key, v)) return false;
  if (v < INT32_MIN || v > INT32_MAX) {
    r.fail("field '" + std::string(key) + "' out of range");
    return false;
  }
  out = static_cast<int>(v);
  return true;
}

}  // namespace

std::string_view to_string(ZoneKind kind) { return kind == ZoneKind::Room ? "Room" : "Lobby"; }

std::string_view to_string(Layer layer) {
  switch (layer) {
    case Layer::External: return "External";
    case Layer::Internal: return "Internal";
    case Layer::DeepInternal: return "DeepInternal";
  }
  return "?";
}

std::string_view to_string(SensorTechnology) { return "Infrared"; }

const Zone* HouseConfig::find_zone(std::string_view id) const {
  auto it = std::find_if(zones.begin(), zones.end(), [&](const Zone& z) { return z.id == id; });
  return it == zones.end() ? nullptr : &*it;
}

HouseConfig default_house() {
  HouseConfig cfg;
  for (int i = 0; i < 6; ++i) {
    cfg.zones.push_back(Zone{"room" + std::to_string(i + 1), "Room " + std::to_string(i + 1), ZoneKind::Room,
                             Layer::Internal, i});
  }
  cfg.zones.push_back(Zone{"lobby", "Lobby", ZoneKind::Lobby, Layer::Internal, 6});
  cfg.siren_channel = 7;
  cfg.sensors.push_back(SensorBinding{"ir1", SensorTechnology::Infrared, LineName::Ack, Layer::External});
  cfg.poll_interval_ms = 50;
  cfg.debounce_samples = 2;
  return cfg;
}

std::vector<std::string> validate_config(const HouseConfig& cfg) {
  std::vector<std::string> out;

  std::set<std::string> zone_ids;
  std::map<int, int> channel_use;
  int lobbies = 0;
  for (const auto& z : cfg.zones) {
    if (z.id.empty()) out.push_back("zone id must not be empty");
    if (!zone_ids.insert(z.id).second) out.push_back("duplicate zone id '" + z.id + "'");
    if (z.channel < 0 || z.channel > kMaxChannel) {
      out.push_back("zone '" + z.id + "': channel " + std::to_string(z.channel) + " out of range 0..7");
    }
    if (z.layer != Layer::Internal) out.push_back("zone '" + z.id + "' must sit on the Internal layer");
    if (z.kind == ZoneKind::Lobby) ++lobbies;
    ++channel_use[z.channel];
  }
  if (cfg.siren_channel) {
    const int ch = *cfg.siren_channel;
    if (ch < 0 || ch > kMaxChannel) out.push_back("siren channel " + std::to_string(ch) + " out of range 0..7");
    ++channel_use[ch];
  }
  for (const auto& [ch, n] : channel_use) {
    if (n > 1) out.push_back("duplicate channel " + std::to_string(ch));
  }
  if (lobbies != 1) out.push_back("expected exactly one lobby, found " + std::to_string(lobbies));

  if (cfg.sensors.empty()) out.push_back("at least one sensor is required");
  std::set<std::string> sensor_ids;
  for (const auto& s : cfg.sensors) {
    if (s.sensor_id.empty()) out.push_back("sensor id must not be empty");
    if (!sensor_ids.insert(s.sensor_id).second) out.push_back("duplicate sensor id '" + s.sensor_id + "'");
    if (group_of(s.line) != LineGroup::Status) {
      out.push_back("sensor requires a status line: '" + s.sensor_id + "' is bound to " +
                    std::string(to_string(s.line)));
    }
    if (s.layer != Layer::External) out.push_back("sensor '" + s.sensor_id + "' must sit on the External layer");
  }

  if (cfg.poll_interval_ms <= 0) out.push_back("poll_interval_ms must be positive");
  if (cfg.debounce_samples <= 0) out.push_back("debounce_samples must be positive");
  return out;
}

std::uint8_t compose_data_byte(const HouseConfig& cfg, const LightMap& lights, bool siren) {
  std::uint8_t value = 0;
  for (const auto& z : cfg.zones) {
    auto it = lights.find(z.id);
    if (it == lights.end()) throw ConfigMismatch("missing light state for zone '" + z.id + "'");
    if (z.channel < 0 || z.channel > kMaxChannel) throw ConfigMismatch("zone '" + z.id + "' has no valid channel");
    if (it->second) value |= static_cast<std::uint8_t>(1U << z.channel);
  }
  for (const auto& [id, _] : lights) {
    if (cfg.find_zone(id) == nullptr) throw ConfigMismatch("unknown zone '" + id + "'");
  }
  if (siren) {
    if (!cfg.siren_channel) throw ConfigMismatch("house has no siren channel");
    value |= static_cast<std::uint8_t>(1U << *cfg.siren_channel);
  }
  return value;
}

DecomposedByte decompose_data_byte(const HouseConfig& cfg, std::uint8_t value) {
  DecomposedByte out;
  for (const auto& z : cfg.zones) out.lights[z.id] = (value >> z.channel) & 1U;
  if (cfg.siren_channel) out.siren = (value >> *cfg.siren_channel) & 1U;
  return out;
}

ConfigError::ConfigError(std::vector<std::string> violations)
    : std::runtime_error("invalid configuration: " + join(violations)), violations_(std::move(violations)) {}

nlohmann::json house_to_json(const HouseConfig& cfg) {
  nlohmann::json zones = nlohmann::json::array();
  for (const auto& z : cfg.zones) {
    zones.push_back({{"id", z.id},
                     {"name", z.name},
                     {"kind", to_string(z.kind)},
                     {"layer", to_string(z.layer)},
                     {"channel", z.channel}});
  }
  nlohmann::json sensors = nlohmann::json::array();
  for (const auto& s : cfg.sensors) {
    sensors.push_back({{"sensor_id", s.sensor_id},
                       {"technology", to_string(s.technology)},
                       {"line", to_string(s.line)},
                       {"layer", to_string(s.layer)}});
  }
  return {{"zones", zones},
          {"siren_channel", cfg.siren_channel ? nlohmann::json(*cfg.siren_channel) : nlohmann::json(nullptr)},
          {"sensors", sensors},
          {"poll_interval_ms", cfg.poll_interval_ms},
          {"debounce_samples", cfg.debounce_samples}};
}

HouseConfig house_from_json(const nlohmann::json& doc) {
  std::vector<std::string> errors;
  HouseConfig cfg;
  detail::FieldReader top(doc, "house", errors);

  if (const auto* zones = top.required("zones")) {
    if (!zones->is_array()) {
      top.fail("field 'zones' must be an array");
    } else {
      for (std::size_t i = 0; i < zones->size(); ++i) {
        detail::FieldReader r((*zones)[i], "house.zones[" + std::to_string(i) + "]", errors);
        Zone z;
        r.string(r.required("id"), "id", z.id);
        r.string(r.required("name"), "name", z.name);
        read_enum(r, "kind", kZoneKinds, z.kind);
        read_enum(r, "layer", kLayers, z.layer);
        read_int(r, "channel", z.channel);
        r.reject_unknown();
        cfg.zones.push_back(std::move(z));
      }
    }
  }

  if (const auto* siren = top.required("siren_channel")) {
    if (siren->is_null()) {
      cfg.siren_channel.reset();
    } else if (siren->is_number_integer()) {
      cfg.siren_channel = siren->get<int>();
    } else {
      top.fail("field 'siren_channel' must be an integer or null");
    }
  }

  if (const auto* sensors = top.required("sensors")) {
    if (!sensors->is_array()) {
      top.fail("field 'sensors' must be an array");
    } else {
      for (std::size_t i = 0; i < sensors->size(); ++i) {
        detail::FieldReader r((*sensors)[i], "house.sensors[" + std::to_string(i) + "]", errors);
        SensorBinding s;
        r.string(r.required("sensor_id"), "sensor_id", s.sensor_id);
        read_enum(r, "technology", kTechnologies, s.technology);
        std::string line;
        if (r.string(r.required("line"), "line", line)) {
          if (auto l = line_from_string(line)) {
            s.line = *l;
          } else {
            r.fail("unknown line '" + line + "'");
          }
        }
        read_enum(r, "layer", kLayers, s.layer);
        r.reject_unknown();
        cfg.sensors.push_back(std::move(s));
      }
    }
  }

  read_int(top, "poll_interval_ms", cfg.poll_interval_ms);
  read_int(top, "debounce_samples", cfg.debounce_samples);
  top.reject_unknown();

  if (!errors.empty()) throw ConfigError(std::move(errors));
  return cfg;
}

}  // namespace autohouse
