#include "autohouse/daemon.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "json_fields.hpp"

namespace autohouse {

namespace fs = std::filesystem;

namespace {

nlohmann::json read_json_file(const fs::path& path, const std::string& what) {
  std::ifstream in(path);
  if (!in) throw ConfigError({what + " file not found: " + path.string()});
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& err) {
    throw ConfigError({what + " file " + path.string() + " is not valid JSON: " + err.what()});
  }
}

fs::path resolve(const fs::path& base_dir, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : base_dir / path;
}

}  // namespace

BindAddress parse_bind(const std::string& bind) {
  const auto colon = bind.rfind(':');
  if (colon == std::string::npos || colon == 0) throw ConfigError({"bind address '" + bind + "' must be host:port"});
  BindAddress out;
  out.host = bind.substr(0, colon);
  const auto port = std::string_view(bind).substr(colon + 1);
  auto [ptr, ec] = std::from_chars(port.data(), port.data() + port.size(), out.port);
  if (ec != std::errc() || ptr != port.data() + port.size() || out.port < 0 || out.port > 65535) {
    throw ConfigError({"bind address '" + bind + "' has an invalid port"});
  }
  return out;
}

DaemonConfig daemon_config_from_json(const nlohmann::json& doc, const fs::path& base_dir) {
  std::vector<std::string> errors;
  DaemonConfig cfg;
  detail::FieldReader r(doc, "config", errors);

  if (const auto* house = r.required("house")) {
    try {
      if (house->is_string()) {
        cfg.house = house_from_json(read_json_file(resolve(base_dir, house->get<std::string>()), "house"));
      } else {
        cfg.house = house_from_json(*house);
      }
      for (auto& v : validate_config(cfg.house)) errors.push_back("house: " + v);
    } catch (const ConfigError& err) {
      errors.insert(errors.end(), err.violations().begin(), err.violations().end());
    }
  }

  if (r.string(r.required("backend"), "backend", cfg.backend) && cfg.backend != "sim" && cfg.backend != "parport") {
    r.fail("backend must be \"sim\" or \"parport\", got '" + cfg.backend + "'");
  }

  if (const auto* scenario = r.optional("scenario"); scenario != nullptr && !scenario->is_null()) {
    std::string p;
    if (r.string(scenario, "scenario", p)) cfg.scenario = resolve(base_dir, p);
  }

  r.boolean(r.required("arm_on_start"), "arm_on_start", cfg.arm_on_start);

  if (r.string(r.required("bind"), "bind", cfg.bind)) {
    try {
      parse_bind(cfg.bind);
    } catch (const ConfigError& err) {
      errors.insert(errors.end(), err.violations().begin(), err.violations().end());
    }
  }

  if (const auto* log = r.required("log_path")) {
    std::string p;
    if (r.string(log, "log_path", p)) cfg.log_path = resolve(base_dir, p);
  }

  r.reject_unknown();
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return cfg;
}

DaemonConfig load_daemon_config(const fs::path& path) {
  const auto doc = read_json_file(path, "config");
  return daemon_config_from_json(doc, path.parent_path());
}

nlohmann::json daemon_config_to_json(const DaemonConfig& cfg) {
  return {{"house", house_to_json(cfg.house)},
          {"backend", cfg.backend},
          {"scenario", cfg.scenario ? nlohmann::json(cfg.scenario->string()) : nlohmann::json(nullptr)},
          {"arm_on_start", cfg.arm_on_start},
          {"bind", cfg.bind},
          {"log_path", cfg.log_path ? cfg.log_path->string() : std::string()}};
}

std::vector<sim::ScenarioEvent> load_scenario_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"scenario file not found: " + path.string()});
  std::stringstream text;
  text << in.rdbuf();
  return sim::load_scenario(text.str());
}

Daemon::Daemon(DaemonConfig cfg, std::vector<sim::ScenarioEvent> scenario) : cfg_(std::move(cfg)) {
  if (auto violations = validate_config(cfg_.house); !violations.empty()) throw ConfigError(std::move(violations));
  if (scenario.empty() && cfg_.scenario) scenario = load_scenario_file(*cfg_.scenario);

  if (cfg_.backend == "sim") {
    world_ = std::make_unique<sim::SimWorld>(sim::make_world(cfg_.house, scenario));
    auto backend = std::make_unique<sim::SimBackend>(*world_);
    sim_backend_ = backend.get();
    backend_ = std::move(backend);
  } else if (cfg_.backend == "parport") {
    if (!scenario.empty()) throw ConfigError({"a scenario requires the sim backend"});
    backend_ = std::make_unique<DirectPortBackend>();
  } else {
    throw ConfigError({"unknown backend '" + cfg_.backend + "'"});
  }

  if (cfg_.log_path) {
    if (cfg_.log_path->has_parent_path()) fs::create_directories(cfg_.log_path->parent_path());
    log_ = std::make_unique<EventLog>(*cfg_.log_path);
  } else {
    log_ = std::make_unique<EventLog>();
  }

  controller_ = std::make_unique<Controller>(cfg_.house, *backend_, *log_, [this] { return now_ms(); },
                                             cfg_.arm_on_start, world_.get());
}

Daemon::~Daemon() { stop(); }

std::uint64_t Daemon::now_ms() const { return world_ ? world_->clock_ms : virtual_clock_ms_; }

std::vector<EventRecord> Daemon::tick() {
  const auto dt = static_cast<std::uint64_t>(cfg_.house.poll_interval_ms);
  if (world_) {
    *world_ = sim::step(*world_, dt);
  } else {
    virtual_clock_ms_ += dt;
  }
  return controller_->poll_tick();
}

void Daemon::run_until(std::uint64_t until_ms) {
  const auto dt = static_cast<std::uint64_t>(cfg_.house.poll_interval_ms);
  while (now_ms() + dt <= until_ms) tick();
  if (now_ms() < until_ms) {
    if (world_) {
      *world_ = sim::step(*world_, until_ms - now_ms());
    } else {
      virtual_clock_ms_ = until_ms;
    }
  }
}

Response Daemon::handle(const Command& c) { return controller_->handle_command(c); }

void Daemon::start(std::chrono::milliseconds period) {
  if (running_.exchange(true)) return;
  {
    std::lock_guard lock(mu_);
    stop_requested_ = false;
  }
  thread_ = std::thread([this, period] { loop(period); });
}

void Daemon::stop() {
  {
    std::lock_guard lock(mu_);
    stop_requested_ = true;
  }
  cv_.notify_all();
  if (thread_.joinable()) thread_.join();
  running_ = false;
  log_->close();
  // Anything still queued will never be served.
  std::lock_guard lock(mu_);
  for (auto& p : inbox_) p.reply.set_value(Response{ResponseStatus::Unsupported, "daemon stopped", {}});
  inbox_.clear();
}

std::future<Response> Daemon::submit(Command c) {
  std::promise<Response> promise;
  auto fut = promise.get_future();
  {
    std::lock_guard lock(mu_);
    if (stop_requested_ || failure_ || !running_) {
      promise.set_value(Response{ResponseStatus::Unsupported, "daemon is not running", {}});
      return fut;
    }
    inbox_.push_back(Pending{std::move(c), std::move(promise)});
  }
  cv_.notify_all();
  return fut;
}

Response Daemon::call(Command c, std::chrono::milliseconds timeout) {
  auto fut = submit(std::move(c));
  if (fut.wait_for(timeout) != std::future_status::ready) {
    return Response{ResponseStatus::Unsupported, "daemon did not answer in time", {}};
  }
  return fut.get();
}

std::optional<std::string> Daemon::failure() const {
  std::lock_guard lock(mu_);
  return failure_;
}

void Daemon::fail(const std::string& why) {
  std::lock_guard lock(mu_);
  failure_ = why;
  stop_requested_ = true;
}

void Daemon::drain_commands() {
  for (;;) {
    Pending p;
    {
      std::lock_guard lock(mu_);
      if (inbox_.empty()) return;
      p = std::move(inbox_.front());
      inbox_.pop_front();
    }
    try {
      p.reply.set_value(controller_->handle_command(p.command));
    } catch (...) {
      p.reply.set_exception(std::current_exception());
      throw;
    }
  }
}

void Daemon::loop(std::chrono::milliseconds period) {
  auto next_tick = std::chrono::steady_clock::now() + period;
  try {
    for (;;) {
      drain_commands();
      if (std::chrono::steady_clock::now() >= next_tick) {
        tick();
        next_tick += period;
        continue;
      }
      std::unique_lock lock(mu_);
      cv_.wait_until(lock, next_tick, [&] { return stop_requested_ || !inbox_.empty(); });
      if (stop_requested_) break;
    }
  } catch (const std::exception& err) {
    fail(err.what());
  }
  log_->close();
}

}  // namespace autohouse
