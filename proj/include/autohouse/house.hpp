#pragma once

// autohouse/house.hpp
//
// The house layout: six rooms and a lobby on the internal layer, each wired to
// one relay channel, an infrared perimeter on the external layer reporting on
// status lines, and the spare channel driving a siren.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "autohouse/port.hpp"

namespace autohouse {

enum class ZoneKind : std::uint8_t { Room, Lobby };
enum class Layer : std::uint8_t { External, Internal, DeepInternal };
enum class SensorTechnology : std::uint8_t { Infrared };

std::string_view to_string(ZoneKind kind);
std::string_view to_string(Layer layer);
std::string_view to_string(SensorTechnology tech);

struct Zone {
  std::string id;
  std::string name;
  ZoneKind kind = ZoneKind::Room;
  Layer layer = Layer::Internal;
  int channel = 0;

  bool operator==(const Zone&) const = default;
};

struct SensorBinding {
  std::string sensor_id;
  SensorTechnology technology = SensorTechnology::Infrared;
  LineName line = LineName::Ack;
  Layer layer = Layer::External;

  bool operator==(const SensorBinding&) const = default;
};

struct HouseConfig {
  std::vector<Zone> zones;
  std::optional<int> siren_channel;
  std::vector<SensorBinding> sensors;
  int poll_interval_ms = 50;
  int debounce_samples = 2;

  const Zone* find_zone(std::string_view id) const;

  bool operator==(const HouseConfig&) const = default;
};

/// room1..room6 on D0..D5, lobby on D6, siren on D7, one IR sensor on ACK.
HouseConfig default_house();

/// Every rule violation found, in a stable order. Empty means valid.
std::vector<std::string> validate_config(const HouseConfig& cfg);

class ConfigMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using LightMap = std::map<std::string, bool, std::less<>>;

/// `lights` must name exactly the configured zones; throws ConfigMismatch
/// otherwise, or if the siren is requested on a house without a siren channel.
std::uint8_t compose_data_byte(const HouseConfig& cfg, const LightMap& lights, bool siren);

struct DecomposedByte {
  LightMap lights;
  bool siren = false;

  bool operator==(const DecomposedByte&) const = default;
};

DecomposedByte decompose_data_byte(const HouseConfig& cfg, std::uint8_t value);

/// Thrown by the JSON readers. Carries every problem found.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

nlohmann::json house_to_json(const HouseConfig& cfg);

/// Strict structural reader: unknown keys, missing fields, wrong types and
/// unknown enum names raise ConfigError. Layout rules are left to
/// validate_config.
HouseConfig house_from_json(const nlohmann::json& doc);

}  // namespace autohouse
