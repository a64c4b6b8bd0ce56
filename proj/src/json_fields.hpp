#pragma once

// Strict field access for configuration documents. Every problem is appended
// to a shared error list so a reader can report all of them at once.

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace autohouse::detail {

class FieldReader {
 public:
  FieldReader(const nlohmann::json& obj, std::string where, std::vector<std::string>& errors)
      : obj_(obj), where_(std::move(where)), errors_(errors) {
    if (!obj_.is_object()) {
      fail("expected an object");
      ok_ = false;
    }
  }

  bool ok() const { return ok_; }

  /// Returns nullptr (and records an error) if absent.
  const nlohmann::json* required(std::string_view key) {
    const auto* v = lookup(key);
    if (ok_ && v == nullptr) fail("missing field '" + std::string(key) + "'");
    return v;
  }

  const nlohmann::json* optional(std::string_view key) { return lookup(key); }

  bool integer(const nlohmann::json* v, std::string_view key, long long& out) {
    if (v == nullptr) return false;
    if (!v->is_number_integer()) {
      fail("field '" + std::string(key) + "' must be an integer");
      return false;
    }
    out = v->get<long long>();
    return true;
  }

  bool boolean(const nlohmann::json* v, std::string_view key, bool& out) {
    if (v == nullptr) return false;
    if (!v->is_boolean()) {
      fail("field '" + std::string(key) + "' must be a boolean");
      return false;
    }
    out = v->get<bool>();
    return true;
  }

  bool string(const nlohmann::json* v, std::string_view key, std::string& out) {
    if (v == nullptr) return false;
    if (!v->is_string()) {
      fail("field '" + std::string(key) + "' must be a string");
      return false;
    }
    out = v->get<std::string>();
    return true;
  }

  /// Records every key that was never looked up.
  void reject_unknown() {
    if (!ok_) return;
    for (const auto& [key, _] : obj_.items()) {
      if (!seen_.count(key)) fail("unknown field '" + key + "'");
    }
  }

  void fail(const std::string& msg) { errors_.push_back(where_.empty() ? msg : where_ + ": " + msg); }

 private:
  const nlohmann::json* lookup(std::string_view key) {
    if (!ok_) return nullptr;
    seen_.emplace(key);
    auto it = obj_.find(std::string(key));
    return it == obj_.end() ? nullptr : &*it;
  }

  const nlohmann::json& obj_;
  std::string where_;
  std::vector<std::string>& errors_;
  std::set<std::string, std::less<>> seen_;
  bool ok_ = true;
};

}  // namespace autohouse::detail
