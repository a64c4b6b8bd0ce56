#include <doctest.h>

#include <httplib.h>

#include "live_daemon.hpp"

using namespace autohouse;
using autohouse::testing::LiveDaemon;
using autohouse::testing::sim_config;
using nlohmann::json;

namespace {

json get_json(httplib::Client& c, const std::string& path, int expect = 200) {
  auto res = c.Get(path);
  REQUIRE(res);
  CHECK(res->status == expect);
  return json::parse(res->body);
}

json post_json(httplib::Client& c, const std::string& path, const std::string& body, int expect) {
  auto res = c.Post(path, body, "application/json");
  REQUIRE(res);
  CHECK(res->status == expect);
  return json::parse(res->body);
}

const json* find_zone(const json& state, const std::string& id) {
  for (const auto& z : state["zones"]) {
    if (z["id"] == id) return &z;
  }
  return nullptr;
}

}  // namespace

TEST_CASE("status mapping") {
  CHECK(http_status(ResponseStatus::Ok) == 200);
  CHECK(http_status(ResponseStatus::NoOp) == 200);
  CHECK(http_status(ResponseStatus::NotFound) == 404);
  CHECK(http_status(ResponseStatus::Unsupported) == 409);
  CHECK(http_status(ResponseStatus::BadRequest) == 400);
  const auto body = response_body(Response{ResponseStatus::NoOp, "already armed", {}});
  CHECK(body["status"] == "no-op");
  CHECK_FALSE(body.contains("data"));
}

TEST_CASE("state, lights and alarm over HTTP") {
  LiveDaemon live(sim_config(false));
  httplib::Client c("127.0.0.1", live.port);

  auto state = get_json(c, "/v1/state");
  CHECK(state["zones"].size() == 7);
  CHECK(state["alarm"]["mode"] == "Disarmed");
  CHECK(state["backend"] == "sim");

  post_json(c, "/v1/zones/room2/light", R"({"on":true})", 200);
  live.wait_ticks(2);
  state = get_json(c, "/v1/state");
  const auto* room2 = find_zone(state, "room2");
  REQUIRE(room2 != nullptr);
  CHECK((*room2)["on"] == true);
  CHECK(state["data_byte"] == 0x02);

  auto nf = post_json(c, "/v1/zones/garage/light", R"({"on":true})", 404);
  CHECK(nf["status"] == "not-found");

  for (const char* bad : {"not json", R"([1])", R"({"on":"yes"})", R"({"on":true,"dim":3})", R"({})"}) {
    auto br = post_json(c, "/v1/zones/room1/light", bad, 400);
    CHECK_FALSE(br["violations"].empty());
  }

  CHECK(post_json(c, "/v1/alarm/disarm", "", 200)["status"] == "no-op");
  CHECK(post_json(c, "/v1/alarm/arm", "", 200)["status"] == "ok");
  live.wait_ticks(2);
  CHECK(get_json(c, "/v1/state")["alarm"]["mode"] == "Armed");
  CHECK(post_json(c, "/v1/alarm/reset", "", 200)["status"] == "no-op");
}

TEST_CASE("events endpoint and injection") {
  LiveDaemon live(sim_config(true));
  httplib::Client c("127.0.0.1", live.port);

  post_json(c, "/v1/sim/inject", R"({"kind":"IrDisturbance","sensor_id":"ir1","duration_ms":300})", 200);
  for (int i = 0; i < 40 && get_json(c, "/v1/state")["alarm"]["mode"] != "Triggered"; ++i) live.wait_ticks(1);
  auto state = get_json(c, "/v1/state");
  CHECK(state["alarm"]["mode"] == "Triggered");
  CHECK(state["siren"] == true);
  CHECK(state["data_byte"] == 0xFF);

  auto events = get_json(c, "/v1/events?since=0");
  REQUIRE(events.is_array());
  std::uint64_t prev = 0;
  int alerts = 0;
  for (const auto& e : events) {
    CHECK(e["seq"].get<std::uint64_t>() == prev + 1);
    prev = e["seq"];
    if (e["kind"] == "Alert") ++alerts;
  }
  CHECK(alerts == 1);
  CHECK(get_json(c, "/v1/events?since=" + std::to_string(prev)).empty());
  get_json(c, "/v1/events?since=-1", 400);

  post_json(c, "/v1/sim/inject", R"({"kind":"Meteor"})", 400);
  post_json(c, "/v1/sim/inject", R"({"kind":"LineStuck","line":"D3","level":"High"})", 400);
}

TEST_CASE("inject is refused without the simulator") {
  DaemonConfig cfg = sim_config(false);
  cfg.backend = "parport";
  LiveDaemon live(cfg, std::chrono::milliseconds(1000));
  httplib::Client c("127.0.0.1", live.port);
  auto body = post_json(c, "/v1/sim/inject", R"({"kind":"PowerLoss"})", 409);
  CHECK(body["status"] == "unsupported");
}

TEST_CASE("stream delivers records as server-sent events") {
  LiveDaemon live(sim_config(true));
  httplib::Client c("127.0.0.1", live.port);
  c.set_read_timeout(std::chrono::seconds(5));

  std::thread trigger([&] {
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
    httplib::Client c2("127.0.0.1", live.port);
    c2.Post("/v1/sim/inject", R"({"kind":"IrDisturbance","sensor_id":"ir1","duration_ms":300})", "application/json");
  });

  std::string buffer;
  bool saw_alert = false;
  std::string content_type;
  auto res = c.Get(
      "/v1/stream", httplib::Headers{{"Last-Event-ID", "0"}},
      [&](const httplib::Response& r) {
        content_type = r.get_header_value("Content-Type");
        return r.status == 200;
      },
      [&](const char* data, std::size_t len) {
        buffer.append(data, len);
        saw_alert = buffer.find("event: Alert\ndata: ") != std::string::npos;
        return !saw_alert;
      });
  trigger.join();
  CHECK(saw_alert);
  CHECK(content_type.rfind("text/event-stream", 0) == 0);
  CHECK(buffer.rfind("id: 1\n", 0) == 0);

  auto bad = c.Get("/v1/stream?since=abc");
  REQUIRE(bad);
  CHECK(bad->status == 400);
}
