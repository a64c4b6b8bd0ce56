#include "autohouse/cli.hpp"

#include <csignal>
#include <iostream>
#include <optional>
#include <thread>

#include <CLI11.hpp>
#include <httplib.h>

#include "autohouse/api.hpp"
#include "autohouse/daemon.hpp"

namespace autohouse::cli {

namespace {

struct RunOptions {
  std::string config;
  std::string scenario;
  std::string log;
  std::string bind;
  std::optional<std::uint64_t> until_ms;
};

struct ClientOptions {
  std::string addr;
  std::string config;
  std::string format = "text";
};

/// Thrown inside client commands to leave with a given exit code.
struct Exit {
  int code;
  std::string message;
};

void print_violations(std::ostream& err, const ConfigError& e) {
  err << "error: invalid configuration\n";
  for (const auto& v : e.violations()) err << "  - " << v << '\n';
}

DaemonConfig load_for_run(const RunOptions& opts) {
  auto cfg = load_daemon_config(opts.config);
  if (!opts.scenario.empty()) cfg.scenario = opts.scenario;
  if (!opts.log.empty()) cfg.log_path = opts.log;
  if (!opts.bind.empty()) {
    parse_bind(opts.bind);
    cfg.bind = opts.bind;
  }
  return cfg;
}

std::unique_ptr<Daemon> make_daemon(DaemonConfig cfg) {
  std::vector<sim::ScenarioEvent> scenario;
  if (cfg.scenario) scenario = load_scenario_file(*cfg.scenario);
  return std::make_unique<Daemon>(std::move(cfg), std::move(scenario));
}

int serve(Daemon& daemon, std::ostream& out, std::ostream& err) {
  const auto bind = parse_bind(daemon.config().bind);

  sigset_t signals, previous;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, &previous);

  ApiServer api(daemon);
  const int port = api.bind(bind.host, bind.port);
  if (port < 0) {
    pthread_sigmask(SIG_SETMASK, &previous, nullptr);
    err << "error: cannot bind " << daemon.config().bind << '\n';
    return kExitRuntime;
  }
  daemon.start(std::chrono::milliseconds(daemon.config().house.poll_interval_ms));
  std::thread http([&] { api.listen(); });
  api.wait_until_ready();
  out << "listening on " << bind.host << ':' << port << std::endl;

  const timespec poll{0, 100'000'000};
  while (!daemon.failure()) {
    if (sigtimedwait(&signals, nullptr, &poll) > 0) break;
  }
  api.stop();
  http.join();
  daemon.stop();
  pthread_sigmask(SIG_SETMASK, &previous, nullptr);

  if (auto why = daemon.failure()) {
    err << "error: " << *why << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

int cmd_run(const RunOptions& opts, std::ostream& out, std::ostream& err) {
  std::unique_ptr<Daemon> daemon;
  try {
    daemon = make_daemon(load_for_run(opts));
  } catch (const ConfigError& e) {
    print_violations(err, e);
    return kExitUsage;
  } catch (const sim::ScenarioError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const StorageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }

  if (!opts.until_ms) return serve(*daemon, out, err);

  try {
    daemon->run_until(*opts.until_ms);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  out << format_status(daemon->controller().snapshot());
  return kExitOk;
}

int cmd_replay(const RunOptions& opts, std::ostream& out, std::ostream& err) {
  std::unique_ptr<Daemon> daemon;
  try {
    auto cfg = load_for_run(opts);
    cfg.log_path.reset();
    daemon = make_daemon(std::move(cfg));
  } catch (const ConfigError& e) {
    print_violations(err, e);
    return kExitUsage;
  } catch (const sim::ScenarioError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  int code = kExitOk;
  try {
    daemon->run_until(*opts.until_ms);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    code = kExitRuntime;
  }
  for (const auto& r : daemon->log().since(0)) out << record_to_line(r) << '\n';
  return code;
}

BindAddress client_address(const ClientOptions& opts) {
  if (!opts.addr.empty()) return parse_bind(opts.addr);
  if (!opts.config.empty()) return parse_bind(load_daemon_config(opts.config).bind);
  return parse_bind(DaemonConfig{}.bind);
}

httplib::Client make_client(const ClientOptions& opts) {
  BindAddress addr;
  try {
    addr = client_address(opts);
  } catch (const ConfigError& e) {
    throw Exit{kExitUsage, e.what()};
  }
  httplib::Client client(addr.host, addr.port);
  client.set_connection_timeout(std::chrono::seconds(2));
  client.set_read_timeout(std::chrono::seconds(5));
  return client;
}

nlohmann::json check(const httplib::Result& res, const std::string& what) {
  if (!res) throw Exit{kExitRuntime, what + ": cannot reach daemon (" + httplib::to_string(res.error()) + ")"};
  nlohmann::json body;
  try {
    body = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::parse_error&) {
    throw Exit{kExitRuntime, what + ": unexpected response (HTTP " + std::to_string(res->status) + ")"};
  }
  if (res->status == 404) throw Exit{kExitRuntime, "not found: " + body.value("message", std::string())};
  if (res->status != 200) {
    std::string msg = body.is_object() ? body.value("message", std::string()) : std::string();
    if (body.is_object() && body.contains("violations")) {
      for (const auto& v : body["violations"]) msg += "; " + v.get<std::string>();
    }
    throw Exit{kExitRuntime, what + " failed (HTTP " + std::to_string(res->status) + "): " + msg};
  }
  return body;
}

void print_action_result(const nlohmann::json& body, std::ostream& out) {
  out << body.value("status", std::string("ok")) << ": " << body.value("message", std::string()) << '\n';
}

void print_record(const EventRecord& r, const std::string& format, std::ostream& out) {
  if (format == "json") {
    out << record_to_line(r) << '\n';
  } else {
    out << format_event(r) << '\n';
  }
  out.flush();
}

int cmd_events(const ClientOptions& opts, std::uint64_t since, bool follow, std::optional<std::uint64_t> count,
               std::ostream& out) {
  auto client = make_client(opts);
  if (!follow) {
    auto body = check(client.Get("/v1/events?since=" + std::to_string(since)), "events");
    std::uint64_t printed = 0;
    for (const auto& j : body) {
      if (count && printed >= *count) break;
      print_record(record_from_json(j), opts.format, out);
      ++printed;
    }
    return kExitOk;
  }

  client.set_read_timeout(std::chrono::hours(24 * 365));
  std::string buffer;
  std::uint64_t printed = 0;
  bool bad_status = false;
  auto res = client.Get(
      "/v1/stream?since=" + std::to_string(since), httplib::Headers{},
      [&](const httplib::Response& response) {
        bad_status = response.status != 200;
        return !bad_status;
      },
      [&](const char* data, std::size_t len) {
        buffer.append(data, len);
        std::size_t end;
        while ((end = buffer.find("\n\n")) != std::string::npos) {
          const std::string message = buffer.substr(0, end);
          buffer.erase(0, end + 2);
          std::size_t pos = 0;
          while (pos < message.size()) {
            auto eol = message.find('\n', pos);
            if (eol == std::string::npos) eol = message.size();
            const auto line = message.substr(pos, eol - pos);
            if (line.rfind("data: ", 0) == 0) {
              print_record(record_from_json(nlohmann::json::parse(line.substr(6))), opts.format, out);
              if (count && ++printed >= *count) return false;
            }
            pos = eol + 1;
          }
        }
        return true;
      });
  if (count && printed >= *count) return kExitOk;
  if (bad_status) throw Exit{kExitRuntime, "events: stream refused"};
  if (!res && res.error() != httplib::Error::Canceled) {
    throw Exit{kExitRuntime, "events: cannot reach daemon (" + httplib::to_string(res.error()) + ")"};
  }
  return kExitOk;
}

}  // namespace

std::string format_status(const nlohmann::json& snapshot) {
  std::string out;
  for (const auto& z : snapshot.at("zones")) {
    out += z.at("id").get<std::string>() + "=" + (z.at("on").get<bool>() ? "on" : "off") + "\n";
  }
  out += std::string("siren=") + (snapshot.at("siren").get<bool>() ? "on" : "off") + "\n";
  out += "alarm=" + snapshot.at("alarm").at("mode").get<std::string>() + "\n";
  out += "episode=" + std::to_string(snapshot.at("alarm").at("episode").get<std::uint64_t>()) + "\n";
  out += "tick=" + std::to_string(snapshot.at("tick").get<std::uint64_t>()) + "\n";
  out += "ts_ms=" + std::to_string(snapshot.at("ts_ms").get<std::uint64_t>()) + "\n";
  return out;
}

std::string format_event(const EventRecord& r) {
  return "seq=" + std::to_string(r.seq) + " ts_ms=" + std::to_string(r.ts_ms) + " kind=" +
         std::string(to_string(r.kind)) + " " + r.payload.dump();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Auto electric house controller", "autohouse"};
  app.require_subcommand(1, 1);

  RunOptions run_opts;
  std::uint64_t until_ms = 0;
  auto* run_cmd = app.add_subcommand("run", "Run the controller daemon");
  run_cmd->add_option("--config", run_opts.config, "Daemon config file")->required();
  run_cmd->add_option("--scenario", run_opts.scenario, "Scenario file (overrides config)");
  auto* until_opt = run_cmd->add_option("--until-ms", until_ms, "Drive the sim clock to N ms and exit");
  run_cmd->add_option("--log", run_opts.log, "Event log path (overrides config)");
  run_cmd->add_option("--bind", run_opts.bind, "host:port (overrides config)");

  RunOptions replay_opts;
  std::uint64_t replay_until = 0;
  auto* replay_cmd = app.add_subcommand("replay", "Run a scenario headlessly and print the event log");
  replay_cmd->add_option("--config", replay_opts.config, "Daemon config file")->required();
  replay_cmd->add_option("--scenario", replay_opts.scenario, "Scenario file (overrides config)");
  replay_cmd->add_option("--until-ms", replay_until, "Sim time to stop at")->required();

  ClientOptions client;
  auto add_client = [&](CLI::App* sub, bool with_format) {
    sub->add_option("--addr", client.addr, "Daemon address host:port");
    sub->add_option("--config", client.config, "Daemon config file (for its bind address)");
    if (with_format) sub->add_option("--format", client.format, "Output format")->check(CLI::IsMember({"text", "json"}));
  };

  auto* status_cmd = app.add_subcommand("status", "Show zones, alarm mode and tick");
  add_client(status_cmd, true);

  std::string zone, light_state;
  auto* light_cmd = app.add_subcommand("light", "Switch a zone light");
  light_cmd->add_option("zone", zone, "Zone id")->required();
  light_cmd->add_option("state", light_state, "on or off")->required()->check(CLI::IsMember({"on", "off"}));
  add_client(light_cmd, false);

  auto* arm_cmd = app.add_subcommand("arm", "Arm the alarm");
  auto* disarm_cmd = app.add_subcommand("disarm", "Disarm the alarm");
  auto* reset_cmd = app.add_subcommand("reset", "Reset a triggered alarm");
  for (auto* sub : {arm_cmd, disarm_cmd, reset_cmd}) add_client(sub, false);

  std::uint64_t since = 0;
  std::uint64_t count = 0;
  bool follow = false;
  auto* events_cmd = app.add_subcommand("events", "Dump or follow the event log");
  add_client(events_cmd, true);
  events_cmd->add_option("--since", since, "Only records after this seq");
  events_cmd->add_flag("--follow", follow, "Keep streaming new records");
  auto* count_opt = events_cmd->add_option("--count", count, "Stop after N records");

  std::vector<std::string> argv_store{"autohouse"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (*run_cmd) {
      if (*until_opt) run_opts.until_ms = until_ms;
      return cmd_run(run_opts, out, err);
    }
    if (*replay_cmd) {
      replay_opts.until_ms = replay_until;
      return cmd_replay(replay_opts, out, err);
    }
    if (*status_cmd) {
      auto c = make_client(client);
      auto body = check(c.Get("/v1/state"), "status");
      if (client.format == "json") {
        out << body.dump(2) << '\n';
      } else {
        out << format_status(body);
      }
      return kExitOk;
    }
    if (*light_cmd) {
      auto c = make_client(client);
      const nlohmann::json req{{"on", light_state == "on"}};
      print_action_result(check(c.Post("/v1/zones/" + zone + "/light", req.dump(), "application/json"), "light"),
                          out);
      return kExitOk;
    }
    for (auto [sub, path] : {std::pair{arm_cmd, "arm"}, std::pair{disarm_cmd, "disarm"}, std::pair{reset_cmd, "reset"}}) {
      if (*sub) {
        auto c = make_client(client);
        print_action_result(check(c.Post(std::string("/v1/alarm/") + path, "", "application/json"), path), out);
        return kExitOk;
      }
    }
    if (*events_cmd) {
      return cmd_events(client, since, follow, *count_opt ? std::optional(count) : std::nullopt, out);
    }
  } catch (const Exit& e) {
    err << "error: " << e.message << '\n';
    return e.code;
  } catch (const ConfigError& e) {
    print_violations(err, e);
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace autohouse::cli
