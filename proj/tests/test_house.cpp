#include <doctest.h>

#include <algorithm>
#include <fstream>

#include "autohouse/house.hpp"

using namespace autohouse;

namespace {

bool contains(const std::vector<std::string>& v, std::string_view needle) {
  return std::any_of(v.begin(), v.end(), [&](const std::string& s) { return s.find(needle) != std::string::npos; });
}

LightMap all_lights(const HouseConfig& cfg, bool on) {
  LightMap m;
  for (const auto& z : cfg.zones) m[z.id] = on;
  return m;
}

}  // namespace

TEST_CASE("default house") {
  const auto cfg = default_house();
  CHECK(cfg.zones.size() == 7);
  CHECK(std::count_if(cfg.zones.begin(), cfg.zones.end(), [](const Zone& z) { return z.kind == ZoneKind::Room; }) == 6);
  REQUIRE(cfg.find_zone("room3") != nullptr);
  CHECK(cfg.find_zone("room3")->channel == 2);
  CHECK(cfg.find_zone("lobby")->channel == 6);
  CHECK(cfg.siren_channel == 7);
  REQUIRE(cfg.sensors.size() == 1);
  CHECK(cfg.sensors[0].line == LineName::Ack);
  CHECK(cfg.sensors[0].layer == Layer::External);
  CHECK(cfg.poll_interval_ms == 50);
  CHECK(cfg.debounce_samples == 2);
  CHECK(validate_config(cfg).empty());
}

TEST_CASE("validate_config reports every violation") {
  SUBCASE("duplicate channel") {
    auto cfg = default_house();
    cfg.zones[0].channel = 3;
    CHECK(contains(validate_config(cfg), "duplicate channel 3"));
  }
  SUBCASE("siren collides with a zone") {
    auto cfg = default_house();
    cfg.siren_channel = 6;
    CHECK(contains(validate_config(cfg), "duplicate channel 6"));
  }
  SUBCASE("sensor on a data line") {
    auto cfg = default_house();
    cfg.sensors[0].line = LineName::D2;
    CHECK(contains(validate_config(cfg), "sensor requires a status line"));
  }
  SUBCASE("several at once") {
    auto cfg = default_house();
    cfg.zones[1].channel = 9;
    cfg.zones[6].kind = ZoneKind::Room;
    cfg.sensors.clear();
    cfg.poll_interval_ms = 0;
    cfg.debounce_samples = -1;
    const auto v = validate_config(cfg);
    CHECK(contains(v, "channel 9 out of range"));
    CHECK(contains(v, "exactly one lobby, found 0"));
    CHECK(contains(v, "at least one sensor"));
    CHECK(contains(v, "poll_interval_ms"));
    CHECK(contains(v, "debounce_samples"));
    CHECK(v.size() == 5);
  }
  SUBCASE("layers") {
    auto cfg = default_house();
    cfg.zones[0].layer = Layer::External;
    cfg.sensors[0].layer = Layer::Internal;
    const auto v = validate_config(cfg);
    CHECK(contains(v, "Internal layer"));
    CHECK(contains(v, "External layer"));
  }
  SUBCASE("two lobbies") {
    auto cfg = default_house();
    cfg.zones[0].kind = ZoneKind::Lobby;
    CHECK(contains(validate_config(cfg), "found 2"));
  }
}

TEST_CASE("compose_data_byte") {
  const auto cfg = default_house();
  CHECK(compose_data_byte(cfg, all_lights(cfg, false), false) == 0x00);

  auto one = all_lights(cfg, false);
  one["room1"] = true;
  CHECK(compose_data_byte(cfg, one, false) == 0x01);

  CHECK(compose_data_byte(cfg, all_lights(cfg, true), true) == 0xFF);
  CHECK(compose_data_byte(cfg, all_lights(cfg, false), true) == 0x80);

  auto missing = all_lights(cfg, false);
  missing.erase("lobby");
  CHECK_THROWS_AS(compose_data_byte(cfg, missing, false), ConfigMismatch);

  auto extra = all_lights(cfg, false);
  extra["garage"] = true;
  CHECK_THROWS_AS(compose_data_byte(cfg, extra, false), ConfigMismatch);

  auto no_siren = cfg;
  no_siren.siren_channel.reset();
  CHECK_THROWS_AS(compose_data_byte(no_siren, all_lights(cfg, false), true), ConfigMismatch);
}

TEST_CASE("compose/decompose round trip over all 256 combinations") {
  const auto cfg = default_house();
  for (int mask = 0; mask < 256; ++mask) {
    LightMap lights;
    for (std::size_t i = 0; i < cfg.zones.size(); ++i) lights[cfg.zones[i].id] = (mask >> i) & 1;
    const bool siren = (mask >> 7) & 1;
    const auto byte = compose_data_byte(cfg, lights, siren);
    const auto back = decompose_data_byte(cfg, byte);
    CHECK(back.lights == lights);
    CHECK(back.siren == siren);
    CHECK(byte == mask);
  }
}

TEST_CASE("relabeling zones leaves the byte unchanged") {
  const auto cfg = default_house();
  auto renamed = cfg;
  LightMap a, b;
  for (std::size_t i = 0; i < cfg.zones.size(); ++i) {
    renamed.zones[i].id = "zone-" + std::to_string(100 - i);
    const bool on = i % 3 == 0;
    a[cfg.zones[i].id] = on;
    b[renamed.zones[i].id] = on;
  }
  std::reverse(renamed.zones.begin(), renamed.zones.end());
  CHECK(compose_data_byte(cfg, a, true) == compose_data_byte(renamed, b, true));
}

TEST_CASE("house JSON") {
  const auto cfg = default_house();
  CHECK(house_from_json(house_to_json(cfg)) == cfg);

  SUBCASE("shipped example equals the default house") {
    std::ifstream in(std::string(AUTOHOUSE_SOURCE_DIR) + "/config/house.json");
    REQUIRE(in);
    CHECK(house_from_json(nlohmann::json::parse(in)) == cfg);
  }
  SUBCASE("unknown keys rejected") {
    auto doc = house_to_json(cfg);
    doc["floors"] = 2;
    doc["zones"][0]["area"] = 12;
    try {
      house_from_json(doc);
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(contains(e.violations(), "unknown field 'floors'"));
      CHECK(contains(e.violations(), "house.zones[0]: unknown field 'area'"));
    }
  }
  SUBCASE("bad values") {
    auto doc = house_to_json(cfg);
    doc["sensors"][0]["line"] = "STROBE";
    doc["zones"][2]["kind"] = "Garage";
    doc.erase("poll_interval_ms");
    try {
      house_from_json(doc);
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(e.violations().size() == 3);
    }
  }
  SUBCASE("null siren") {
    auto doc = house_to_json(cfg);
    doc["siren_channel"] = nullptr;
    CHECK_FALSE(house_from_json(doc).siren_channel.has_value());
  }
}
