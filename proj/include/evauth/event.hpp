#pragma once

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "evauth/errors.hpp"
#include "evauth/time.hpp"

namespace evauth {

enum class EventKind {
  sms_in,
  sms_out,
  call_in,
  call_out,
  browser_poll,
  wifi_session,
};

inline const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::sms_in: return "sms_in";
    case EventKind::sms_out: return "sms_out";
    case EventKind::call_in: return "call_in";
    case EventKind::call_out: return "call_out";
    case EventKind::browser_poll: return "browser_poll";
    case EventKind::wifi_session: return "wifi_session";
  }
  return "?";
}

inline std::optional<EventKind> event_kind_from_string(std::string_view s) {
  if (s == "sms_in") return EventKind::sms_in;
  if (s == "sms_out") return EventKind::sms_out;
  if (s == "call_in") return EventKind::call_in;
  if (s == "call_out") return EventKind::call_out;
  if (s == "browser_poll") return EventKind::browser_poll;
  if (s == "wifi_session") return EventKind::wifi_session;
  return std::nullopt;
}

inline bool is_sms(EventKind k) {
  return k == EventKind::sms_in || k == EventKind::sms_out;
}
inline bool is_call(EventKind k) {
  return k == EventKind::call_in || k == EventKind::call_out;
}

// One behavior event. Only the fields belonging to `kind` are meaningful:
//   sms_in/sms_out            peer
//   call_in/call_out          peer, duration_s
//   browser_poll              domains (visits since the previous poll)
//   wifi_session              peer (SSID), session_start, duration_s
// A wifi_session is stamped at disconnect time; ts is the session end.
struct Event {
  Timestamp ts = 0;
  EventKind kind = EventKind::sms_in;
  std::string peer;
  std::int64_t duration_s = 0;
  std::vector<std::string> domains;
  Timestamp session_start = 0;

  friend bool operator==(const Event&, const Event&) = default;
};

struct EventLog {
  std::vector<Event> events;
};

// Identifiers (phone numbers, domains, SSIDs) the device owner knows.
struct ContactList {
  std::set<std::string> entries;

  bool contains(const std::string& id) const { return entries.count(id) != 0; }
};

namespace detail {

inline std::string trim(std::string_view s) {
  auto issp = [](unsigned char c) { return std::isspace(c) != 0; };
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && issp(s[b])) ++b;
  while (e > b && issp(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

inline std::string excerpt(std::string_view line) {
  constexpr std::size_t kMax = 80;
  if (line.size() <= kMax) return std::string(line);
  return std::string(line.substr(0, kMax)) + "...";
}

inline std::int64_t require_int(const nlohmann::json& j, const char* key,
                                const std::string& line) {
  const auto& v = j.at(key);
  if (!v.is_number_integer()) {
    throw SchemaError(std::string("field '") + key +
                      "' must be an integer in line: " + excerpt(line));
  }
  return v.get<std::int64_t>();
}

inline std::string require_identifier(const nlohmann::json& v, const char* key,
                                      const std::string& line) {
  if (!v.is_string()) {
    throw SchemaError(std::string("field '") + key +
                      "' must be a string in line: " + excerpt(line));
  }
  std::string id = trim(v.get<std::string>());
  if (id.empty()) {
    throw SchemaError(std::string("field '") + key +
                      "' must be a non-empty identifier in line: " + excerpt(line));
  }
  return id;
}

}  // namespace detail

// Decodes one JSON Lines record. Enforces the schema strictly: unknown kinds,
// missing or extra kind-specific fields, and negative durations are errors.
// Consistency across events (timestamp ordering, wifi duration arithmetic)
// is the job of validate_log, not the parser.
inline Event parse_event_line(const std::string& line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed JSON (") + e.what() +
                     ") in line: " + detail::excerpt(line));
  }
  if (!j.is_object()) {
    throw SchemaError("event record must be a JSON object in line: " +
                      detail::excerpt(line));
  }
  if (!j.contains("ts") || !j.contains("kind")) {
    throw SchemaError("event record requires 'ts' and 'kind' in line: " +
                      detail::excerpt(line));
  }
  if (!j.at("kind").is_string()) {
    throw SchemaError("field 'kind' must be a string in line: " + detail::excerpt(line));
  }
  const auto kind = event_kind_from_string(j.at("kind").get<std::string>());
  if (!kind) {
    throw SchemaError("unknown kind '" + j.at("kind").get<std::string>() +
                      "' in line: " + detail::excerpt(line));
  }

  Event ev;
  ev.kind = *kind;
  ev.ts = detail::require_int(j, "ts", line);
  if (ev.ts < 0) {
    throw SchemaError("field 'ts' must be non-negative in line: " + detail::excerpt(line));
  }

  std::set<std::string> allowed = {"ts", "kind"};
  switch (ev.kind) {
    case EventKind::sms_in:
    case EventKind::sms_out:
      allowed.insert("peer");
      break;
    case EventKind::call_in:
    case EventKind::call_out:
      allowed.insert({"peer", "duration_s"});
      break;
    case EventKind::browser_poll:
      allowed.insert("domains");
      break;
    case EventKind::wifi_session:
      allowed.insert({"peer", "session_start", "duration_s"});
      break;
  }
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) {
      throw SchemaError("unexpected field '" + item.key() + "' for kind '" +
                        to_string(ev.kind) + "' in line: " + detail::excerpt(line));
    }
  }
  for (const auto& key : allowed) {
    if (!j.contains(key)) {
      throw SchemaError("missing field '" + key + "' for kind '" +
                        to_string(ev.kind) + "' in line: " + detail::excerpt(line));
    }
  }

  if (is_sms(ev.kind) || is_call(ev.kind) || ev.kind == EventKind::wifi_session) {
    ev.peer = detail::require_identifier(j.at("peer"), "peer", line);
  }
  if (is_call(ev.kind) || ev.kind == EventKind::wifi_session) {
    ev.duration_s = detail::require_int(j, "duration_s", line);
    if (ev.duration_s < 0) {
      throw SchemaError("field 'duration_s' must be non-negative in line: " +
                        detail::excerpt(line));
    }
  }
  if (ev.kind == EventKind::wifi_session) {
    ev.session_start = detail::require_int(j, "session_start", line);
    if (ev.session_start < 0) {
      throw SchemaError("field 'session_start' must be non-negative in line: " +
                        detail::excerpt(line));
    }
  }
  if (ev.kind == EventKind::browser_poll) {
    const auto& d = j.at("domains");
    if (!d.is_array()) {
      throw SchemaError("field 'domains' must be an array in line: " +
                        detail::excerpt(line));
    }
    for (const auto& entry : d) {
      ev.domains.push_back(detail::require_identifier(entry, "domains", line));
    }
  }
  return ev;
}

// Inverse of parse_event_line; emits a single compact JSON line without the
// trailing newline. Keys are alphabetically ordered, so output is stable.
inline std::string serialize_event(const Event& ev) {
  nlohmann::json j;
  j["ts"] = ev.ts;
  j["kind"] = to_string(ev.kind);
  switch (ev.kind) {
    case EventKind::sms_in:
    case EventKind::sms_out:
      j["peer"] = ev.peer;
      break;
    case EventKind::call_in:
    case EventKind::call_out:
      j["peer"] = ev.peer;
      j["duration_s"] = ev.duration_s;
      break;
    case EventKind::browser_poll:
      j["domains"] = ev.domains;
      break;
    case EventKind::wifi_session:
      j["peer"] = ev.peer;
      j["session_start"] = ev.session_start;
      j["duration_s"] = ev.duration_s;
      break;
  }
  return j.dump();
}

// One identifier per line; surrounding whitespace trimmed, blank lines and
// duplicates collapsed.
inline ContactList load_contacts(std::istream& in) {
  ContactList contacts;
  std::string line;
  while (std::getline(in, line)) {
    std::string id = detail::trim(line);
    if (!id.empty()) contacts.entries.insert(std::move(id));
  }
  return contacts;
}

inline ContactList load_contacts_text(const std::string& text) {
  std::istringstream in(text);
  return load_contacts(in);
}

struct ValidationReport {
  // First index whose timestamp is smaller than its predecessor's.
  std::optional<std::size_t> first_order_violation;
  // Indices of wifi_session events where duration_s != ts - session_start.
  std::vector<std::size_t> wifi_duration_mismatches;

  bool ok() const {
    return !first_order_violation && wifi_duration_mismatches.empty();
  }

  std::string describe() const {
    if (ok()) return "ok";
    std::ostringstream out;
    if (first_order_violation) {
      out << "timestamps decrease at event index " << *first_order_violation;
    }
    for (std::size_t idx : wifi_duration_mismatches) {
      if (out.tellp() > 0) out << "; ";
      out << "wifi_session duration mismatch at event index " << idx;
    }
    return out.str();
  }
};

inline ValidationReport validate_log(const EventLog& log) {
  ValidationReport report;
  for (std::size_t i = 0; i < log.events.size(); ++i) {
    const Event& ev = log.events[i];
    if (i > 0 && !report.first_order_violation &&
        ev.ts < log.events[i - 1].ts) {
      report.first_order_violation = i;
    }
    if (ev.kind == EventKind::wifi_session &&
        ev.duration_s != ev.ts - ev.session_start) {
      report.wifi_duration_mismatches.push_back(i);
    }
  }
  return report;
}

// Reads a JSON Lines event stream. Blank lines are skipped; parse and schema
// errors are re-thrown with "<source>:<line>" context.
inline EventLog read_event_log(std::istream& in,
                               const std::string& source = "<stream>") {
  EventLog log;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    try {
      log.events.push_back(parse_event_line(line));
    } catch (const ParseError& e) {
      throw ParseError(source + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const SchemaError& e) {
      throw SchemaError(source + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return log;
}

inline void write_event_log(std::ostream& out, const EventLog& log) {
  for (const Event& ev : log.events) {
    out << serialize_event(ev) << '\n';
  }
}

inline EventLog read_event_log_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open event log: " + path.string());
  return read_event_log(in, path.string());
}

inline ContactList read_contacts_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open contacts file: " + path.string());
  return load_contacts(in);
}

}  // namespace evauth
