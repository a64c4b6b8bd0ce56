#include "autohouse/event_log.hpp"

#include <array>
#include <istream>

namespace autohouse {

namespace {

constexpr std::array kKinds{EventKind::SensorRaw, EventKind::AlarmTransition, EventKind::Alert,
                            EventKind::Command,   EventKind::DataWrite,       EventKind::PowerChange,
                            EventKind::Warning};

}  // namespace

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::SensorRaw: return "SensorRaw";
    case EventKind::AlarmTransition: return "AlarmTransition";
    case EventKind::Alert: return "Alert";
    case EventKind::Command: return "Command";
    case EventKind::DataWrite: return "DataWrite";
    case EventKind::PowerChange: return "PowerChange";
    case EventKind::Warning: return "Warning";
  }
  return "?";
}

std::optional<EventKind> event_kind_from_string(std::string_view name) {
  for (auto k : kKinds) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

nlohmann::json record_to_json(const EventRecord& r) {
  return {{"seq", r.seq}, {"ts_ms", r.ts_ms}, {"kind", to_string(r.kind)}, {"payload", r.payload}};
}

EventRecord record_from_json(const nlohmann::json& j) {
  if (!j.is_object() || j.size() != 4) throw std::runtime_error("event record must be an object with 4 fields");
  EventRecord r;
  r.seq = j.at("seq").get<std::uint64_t>();
  r.ts_ms = j.at("ts_ms").get<std::uint64_t>();
  const auto kind = j.at("kind").get<std::string>();
  auto k = event_kind_from_string(kind);
  if (!k) throw std::runtime_error("unknown event kind '" + kind + "'");
  r.kind = *k;
  r.payload = j.at("payload");
  if (!r.payload.is_object()) throw std::runtime_error("event payload must be an object");
  return r;
}

std::string record_to_line(const EventRecord& r) {
  std::string line = "{\"seq\":" + std::to_string(r.seq) + ",\"ts_ms\":" + std::to_string(r.ts_ms) +
                     ",\"kind\":\"" + std::string(to_string(r.kind)) + "\",\"payload\":" + r.payload.dump() + "}";
  return line;
}

std::vector<EventRecord> parse_log(std::istream& in) {
  std::vector<EventRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(record_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& err) {
      throw std::runtime_error("event log line " + std::to_string(lineno) + ": " + err.what());
    }
  }
  return out;
}

EventLog::EventLog(const std::filesystem::path& path) : path_(path) {
  if (std::filesystem::exists(path)) {
    std::ifstream in(path);
    if (!in) throw StorageError("cannot read event log " + path.string());
    records_ = parse_log(in);
    for (std::size_t i = 0; i < records_.size(); ++i) {
      if (records_[i].seq != i + 1) {
        throw StorageError("event log " + path.string() + " has a sequence gap at line " + std::to_string(i + 1));
      }
    }
  }
  file_.emplace(path, std::ios::out | std::ios::app);
  if (!*file_) throw StorageError("cannot open event log " + path.string() + " for append");
}

void EventLog::append(const EventRecord& r) {
  {
    std::lock_guard lock(mu_);
    const auto expected = records_.size() + 1;
    if (r.seq != expected) {
      throw std::logic_error("event seq " + std::to_string(r.seq) + " appended, expected " + std::to_string(expected));
    }
    if (file_) {
      *file_ << record_to_line(r) << '\n';
      file_->flush();
      if (!*file_) throw StorageError("write to event log " + path_.string() + " failed");
    }
    records_.push_back(r);
  }
  cv_.notify_all();
}

EventRecord EventLog::append(std::uint64_t ts_ms, EventKind kind, nlohmann::json payload) {
  EventRecord r{next_seq(), ts_ms, kind, std::move(payload)};
  append(r);
  return r;
}

std::uint64_t EventLog::next_seq() const {
  std::lock_guard lock(mu_);
  return records_.size() + 1;
}

std::uint64_t EventLog::last_seq() const {
  std::lock_guard lock(mu_);
  return records_.size();
}

std::size_t EventLog::size() const {
  std::lock_guard lock(mu_);
  return records_.size();
}

std::vector<EventRecord> EventLog::since(std::uint64_t after) const {
  std::lock_guard lock(mu_);
  if (after >= records_.size()) return {};
  return {records_.begin() + static_cast<std::ptrdiff_t>(after), records_.end()};
}

bool EventLog::wait_after(std::uint64_t after, std::chrono::milliseconds timeout) const {
  std::unique_lock lock(mu_);
  cv_.wait_for(lock, timeout, [&] { return closed_ || records_.size() > after; });
  return records_.size() > after;
}

void EventLog::close() {
  {
    std::lock_guard lock(mu_);
    closed_ = true;
  }
  cv_.notify_all();
}

bool EventLog::closed() const {
  std::lock_guard lock(mu_);
  return closed_;
}

}  // namespace autohouse
