#pragma once

// autohouse/cli.hpp
//
//   autohouse run     --config FILE [--scenario FILE] [--until-ms N] [--log FILE] [--bind HOST:PORT]
//   autohouse replay  --config FILE [--scenario FILE] --until-ms N
//   autohouse status  [--addr HOST:PORT] [--format text|json]
//   autohouse light   ZONE on|off
//   autohouse arm | disarm | reset
//   autohouse events  [--since N] [--follow] [--count N] [--format text|json]
//
// Client subcommands take --addr, or --config to use its bind address.
// Exit codes: 0 success, 1 runtime or API failure, 2 usage or config error.

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "autohouse/event_log.hpp"

namespace autohouse::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// key=value lines: one per zone, then siren, alarm, episode, tick, ts_ms.
std::string format_status(const nlohmann::json& snapshot);

std::string format_event(const EventRecord& r);

}  // namespace autohouse::cli
