#pragma once

// autohouse/event_log.hpp
//
// Append-only JSON Lines audit log. One record per line, sequence numbers
// start at 1 and never skip. Each append is flushed before it returns.
// Readers may wait for new records from other threads.

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace autohouse {

enum class EventKind : std::uint8_t { SensorRaw, AlarmTransition, Alert, Command, DataWrite, PowerChange, Warning };

std::string_view to_string(EventKind kind);
std::optional<EventKind> event_kind_from_string(std::string_view name);

struct EventRecord {
  std::uint64_t seq = 0;
  std::uint64_t ts_ms = 0;
  EventKind kind = EventKind::Warning;
  nlohmann::json payload = nlohmann::json::object();

  bool operator==(const EventRecord&) const = default;
};

nlohmann::json record_to_json(const EventRecord& r);
EventRecord record_from_json(const nlohmann::json& j);

/// Serialized form used on disk and on the wire: compact JSON, fixed key order.
std::string record_to_line(const EventRecord& r);

/// Parses a JSON Lines log. Blank lines are skipped; anything else malformed
/// throws std::runtime_error naming the line number.
std::vector<EventRecord> parse_log(std::istream& in);

class StorageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EventLog {
 public:
  /// Memory only.
  EventLog() = default;

  /// Appends to `path`, resuming the sequence after any records already there.
  explicit EventLog(const std::filesystem::path& path);

  EventLog(const EventLog&) = delete;
  EventLog& operator=(const EventLog&) = delete;

  /// `r.seq` must equal next_seq(); a gap is a programming error and throws
  /// std::logic_error. Throws StorageError if the line cannot be written.
  void append(const EventRecord& r);

  /// Builds the record with the next sequence number and appends it.
  EventRecord append(std::uint64_t ts_ms, EventKind kind, nlohmann::json payload);

  std::uint64_t next_seq() const;
  std::uint64_t last_seq() const;
  std::size_t size() const;

  /// Records with seq > `after`, in order.
  std::vector<EventRecord> since(std::uint64_t after) const;

  /// Blocks until a record with seq > `after` exists, the log is closed, or
  /// the timeout passes. Returns true if such a record exists.
  bool wait_after(std::uint64_t after, std::chrono::milliseconds timeout) const;

  /// Wakes all waiters; later waits return immediately.
  void close();
  bool closed() const;

 private:
  mutable std::mutex mu_;
  mutable std::condition_variable cv_;
  std::vector<EventRecord> records_;
  std::optional<std::ofstream> file_;
  std::filesystem::path path_;
  bool closed_ = false;
};

}  // namespace autohouse
