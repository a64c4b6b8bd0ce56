#include <doctest.h>

#include <fstream>
#include <sstream>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include "autohouse/cli.hpp"
#include "live_daemon.hpp"

using namespace autohouse;
using autohouse::testing::LiveDaemon;
using autohouse::testing::sim_config;
using autohouse::testing::temp_file;

namespace {

const std::string kSource = AUTOHOUSE_SOURCE_DIR;
const std::string kConfig = kSource + "/config/daemon.json";
const std::string kIntrusion = kSource + "/config/scenarios/intrusion.json";

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string write_file(const std::string& name, const std::string& text) {
  const auto path = temp_file(name);
  std::ofstream(path) << text;
  return path.string();
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// An address nothing listens on: bind a port, then release it.
std::string dead_address() {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in sa{};
  sa.sin_family = AF_INET;
  sa.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  socklen_t len = sizeof sa;
  ::bind(fd, reinterpret_cast<sockaddr*>(&sa), len);
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&sa), &len);
  ::close(fd);
  return "127.0.0.1:" + std::to_string(ntohs(sa.sin_port));
}

}  // namespace

TEST_CASE("usage errors exit 2") {
  CHECK(invoke({}).code == cli::kExitUsage);
  CHECK(invoke({"frobnicate"}).code == cli::kExitUsage);
  CHECK(invoke({"run"}).code == cli::kExitUsage);
  CHECK(invoke({"run", "--config", kConfig, "--until-ms", "soon"}).code == cli::kExitUsage);
  CHECK(invoke({"light", "room1", "dim", "--addr", "127.0.0.1:1"}).code == cli::kExitUsage);
  CHECK(invoke({"status", "--addr", "127.0.0.1:1", "--format", "xml"}).code == cli::kExitUsage);
  CHECK(invoke({"status", "--addr", "nohost"}).code == cli::kExitUsage);

  auto missing = invoke({"run", "--config", "/nonexistent/daemon.json", "--until-ms", "0"});
  CHECK(missing.code == cli::kExitUsage);
  CHECK(missing.err.find("not found") != std::string::npos);

  const auto bad_cfg = write_file("bad-daemon.json", R"({"house":"house.json","backend":"sim"})");
  auto bad = invoke({"run", "--config", bad_cfg, "--until-ms", "0"});
  CHECK(bad.code == cli::kExitUsage);
  CHECK(bad.err.find("invalid configuration") != std::string::npos);

  const auto bad_scenario = write_file("bad-scenario.json", R"([{"t_ms":1,"kind":"Meteor"}])");
  CHECK(invoke({"run", "--config", kConfig, "--scenario", bad_scenario, "--until-ms", "0"}).code == cli::kExitUsage);
}

TEST_CASE("headless run prints status") {
  const auto log = temp_file("cli-idle.jsonl").string();
  auto idle = invoke({"run", "--config", kConfig, "--log", log, "--until-ms", "0"});
  CHECK(idle.code == cli::kExitOk);
  for (const char* zone : {"room1", "room2", "room3", "room4", "room5", "room6", "lobby"}) {
    CHECK(idle.out.find(std::string(zone) + "=off\n") != std::string::npos);
  }
  CHECK(idle.out.find("alarm=Armed\n") != std::string::npos);

  auto intrusion = invoke({"run", "--config", kConfig, "--scenario", kIntrusion, "--log", log, "--until-ms", "1000"});
  CHECK(intrusion.code == cli::kExitOk);
  CHECK(intrusion.out.find("alarm=Triggered\n") != std::string::npos);
  CHECK(intrusion.out.find("siren=on\n") != std::string::npos);
  CHECK(intrusion.out.find("ts_ms=1000\n") != std::string::npos);
}

TEST_CASE("parport backend fails at runtime") {
  const auto cfg = write_file("parport-daemon.json", R"({"house":")" + kSource +
                                                          R"(/config/house.json","backend":"parport",
      "scenario":null,"arm_on_start":true,"bind":"127.0.0.1:0","log_path":")" +
                                                          temp_file("parport.jsonl").string() + R"("})");
  auto r = invoke({"run", "--config", cfg, "--until-ms", "500"});
  CHECK(r.code == cli::kExitRuntime);
  CHECK(r.err.find("error:") != std::string::npos);
}

TEST_CASE("replay is deterministic") {
  auto a = invoke({"replay", "--config", kConfig, "--scenario", kIntrusion, "--until-ms", "2000"});
  auto b = invoke({"replay", "--config", kConfig, "--scenario", kIntrusion, "--until-ms", "2000"});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find("\"kind\":\"Alert\"") != std::string::npos);

  const auto log1 = temp_file("replay-1.jsonl");
  const auto log2 = temp_file("replay-2.jsonl");
  CHECK(invoke({"run", "--config", kConfig, "--scenario", kIntrusion, "--log", log1.string(), "--until-ms", "2000"}).code == 0);
  CHECK(invoke({"run", "--config", kConfig, "--scenario", kIntrusion, "--log", log2.string(), "--until-ms", "2000"}).code == 0);
  CHECK(slurp(log1) == slurp(log2));
  CHECK(slurp(log1) == a.out);
}

TEST_CASE("client commands against an unreachable daemon exit 1") {
  const auto addr = dead_address();
  auto r = invoke({"light", "room1", "on", "--addr", addr});
  CHECK(r.code == cli::kExitRuntime);
  CHECK(r.err.find("cannot reach daemon") != std::string::npos);
  CHECK(invoke({"status", "--addr", addr}).code == cli::kExitRuntime);
  CHECK(invoke({"events", "--follow", "--addr", addr}).code == cli::kExitRuntime);
}

TEST_CASE("client commands against a live daemon") {
  LiveDaemon live(sim_config(false));
  const auto addr = live.addr();

  auto light = invoke({"light", "room3", "on", "--addr", addr});
  CHECK(light.code == 0);
  CHECK(light.out.rfind("ok:", 0) == 0);
  live.wait_ticks(2);

  auto status = invoke({"status", "--addr", addr});
  CHECK(status.code == 0);
  CHECK(status.out.find("room3=on\n") != std::string::npos);
  CHECK(status.out.find("alarm=Disarmed\n") != std::string::npos);

  auto json_status = invoke({"status", "--addr", addr, "--format", "json"});
  CHECK(nlohmann::json::parse(json_status.out)["zones"].size() == 7);

  auto garage = invoke({"light", "garage", "on", "--addr", addr});
  CHECK(garage.code == cli::kExitRuntime);
  CHECK(garage.err.find("not found") != std::string::npos);

  CHECK(invoke({"disarm", "--addr", addr}).out.rfind("no-op:", 0) == 0);
  CHECK(invoke({"arm", "--addr", addr}).code == 0);
  CHECK(invoke({"reset", "--addr", addr}).code == 0);

  auto events = invoke({"events", "--since", "0", "--addr", addr, "--format", "json"});
  CHECK(events.code == 0);
  CHECK(events.out.find("\"kind\":\"Command\"") != std::string::npos);

  auto follow = invoke({"events", "--follow", "--since", "0", "--count", "2", "--addr", addr});
  CHECK(follow.code == 0);
  CHECK(follow.out.rfind("seq=1 ", 0) == 0);
  CHECK(follow.out.find("\nseq=2 ") != std::string::npos);
}
