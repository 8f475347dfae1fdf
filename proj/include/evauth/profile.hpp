#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "evauth/errors.hpp"
#include "evauth/event.hpp"
#include "evauth/time.hpp"

namespace evauth {

struct WeightedId {
  std::string id;
  double weight = 1.0;
};

// Mean events per day for each generated stream. browser_visit counts
// individual domain hits, which the generator batches into polls.
struct EventRates {
  double sms_in = 0.0;
  double sms_out = 0.0;
  double call_in = 0.0;
  double call_out = 0.0;
  double browser_visit = 0.0;
  double wifi_session = 0.0;
};

// Synthetic legitimate-user profile for the replay harness. Identifiers are
// drawn from the weighted pools with probability 1 - novelty_rate and are
// fresh (never repeated) otherwise.
struct ProfileSpec {
  std::vector<WeightedId> contact_pool;
  std::vector<WeightedId> favorite_domains;
  std::vector<WeightedId> favorite_ssids;
  EventRates daily_event_rate;
  double call_mean_duration_s = 180.0;
  double wifi_mean_duration_s = 2400.0;
  double novelty_rate = 0.05;
  int browser_poll_interval_s = 1200;  // 20-minute extraction grid
  std::uint64_t rng_seed = 1;
};

enum class AttackCase { case1, case2 };

inline const char* to_string(AttackCase c) {
  return c == AttackCase::case1 ? "case1" : "case2";
}

// Device-theft injection spec. case1 is continuous but unhurried use;
// case2 is intensive immediate use. Identifier pools must be disjoint from
// the legitimate profile's pools and contacts.
struct AttackSpec {
  Timestamp start_ts = 0;
  AttackCase attack_case = AttackCase::case1;
  // Mean minutes between attacker events; defaults to 12 (case1) or 2 (case2).
  std::optional<double> mean_interevent_min;
  double duration_min = 240.0;
  std::vector<std::string> peers;
  std::vector<std::string> domains;
  std::vector<std::string> ssids;
  std::uint64_t rng_seed = 1;

  double effective_mean_interevent_min() const {
    if (mean_interevent_min) return *mean_interevent_min;
    return attack_case == AttackCase::case1 ? 12.0 : 2.0;
  }
};

namespace detail {

inline std::vector<WeightedId> parse_weighted_pool(const nlohmann::json& v,
                                                   const std::string& key) {
  if (!v.is_array()) throw ConfigError("'" + key + "' must be an array");
  std::vector<WeightedId> pool;
  for (const auto& entry : v) {
    WeightedId w;
    if (entry.is_string()) {
      w.id = trim(entry.get<std::string>());
    } else if (entry.is_object()) {
      for (const auto& item : entry.items()) {
        if (item.key() == "id" && item.value().is_string()) {
          w.id = trim(item.value().get<std::string>());
        } else if (item.key() == "weight" && item.value().is_number()) {
          w.weight = item.value().get<double>();
        } else {
          throw ConfigError("'" + key + "' entries allow only 'id' and 'weight'");
        }
      }
    } else {
      throw ConfigError("'" + key + "' entries must be strings or {id, weight} objects");
    }
    if (w.id.empty()) throw ConfigError("'" + key + "' entries must carry a non-empty id");
    if (!(w.weight > 0)) throw ConfigError("'" + key + "' weights must be positive");
    pool.push_back(std::move(w));
  }
  return pool;
}

inline std::vector<std::string> parse_string_pool(const nlohmann::json& v,
                                                  const std::string& key) {
  if (!v.is_array()) throw ConfigError("'" + key + "' must be an array");
  std::vector<std::string> pool;
  for (const auto& entry : v) {
    if (!entry.is_string()) throw ConfigError("'" + key + "' must hold strings");
    std::string id = trim(entry.get<std::string>());
    if (id.empty()) throw ConfigError("'" + key + "' entries must be non-empty");
    pool.push_back(std::move(id));
  }
  return pool;
}

}  // namespace detail

inline ProfileSpec profile_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("profile must be a JSON object");
  ProfileSpec p;
  for (const auto& item : j.items()) {
    const std::string& key = item.key();
    const nlohmann::json& v = item.value();
    if (key == "contact_pool") {
      p.contact_pool = detail::parse_weighted_pool(v, key);
    } else if (key == "favorite_domains") {
      p.favorite_domains = detail::parse_weighted_pool(v, key);
    } else if (key == "favorite_ssids") {
      p.favorite_ssids = detail::parse_weighted_pool(v, key);
    } else if (key == "daily_event_rate") {
      if (!v.is_object()) throw ConfigError("'daily_event_rate' must be an object");
      for (const auto& rate : v.items()) {
        if (!rate.value().is_number() || rate.value().get<double>() < 0) {
          throw ConfigError("'daily_event_rate." + rate.key() +
                            "' must be a non-negative number");
        }
        double r = rate.value().get<double>();
        if (rate.key() == "sms_in") p.daily_event_rate.sms_in = r;
        else if (rate.key() == "sms_out") p.daily_event_rate.sms_out = r;
        else if (rate.key() == "call_in") p.daily_event_rate.call_in = r;
        else if (rate.key() == "call_out") p.daily_event_rate.call_out = r;
        else if (rate.key() == "browser_visit") p.daily_event_rate.browser_visit = r;
        else if (rate.key() == "wifi_session") p.daily_event_rate.wifi_session = r;
        else throw ConfigError("unknown daily_event_rate key '" + rate.key() + "'");
      }
    } else if (key == "call_mean_duration_s") {
      if (!v.is_number() || v.get<double>() < 0) {
        throw ConfigError("'call_mean_duration_s' must be a non-negative number");
      }
      p.call_mean_duration_s = v.get<double>();
    } else if (key == "wifi_mean_duration_s") {
      if (!v.is_number() || v.get<double>() < 0) {
        throw ConfigError("'wifi_mean_duration_s' must be a non-negative number");
      }
      p.wifi_mean_duration_s = v.get<double>();
    } else if (key == "novelty_rate") {
      if (!v.is_number()) throw ConfigError("'novelty_rate' must be a number");
      p.novelty_rate = v.get<double>();
      if (p.novelty_rate < 0 || p.novelty_rate > 1) {
        throw ConfigError("'novelty_rate' must be within [0, 1]");
      }
    } else if (key == "browser_poll_interval_s") {
      if (!v.is_number_integer() || v.get<std::int64_t>() <= 0) {
        throw ConfigError("'browser_poll_interval_s' must be a positive integer");
      }
      p.browser_poll_interval_s = static_cast<int>(v.get<std::int64_t>());
    } else if (key == "rng_seed") {
      if (!v.is_number_integer()) throw ConfigError("'rng_seed' must be an integer");
      p.rng_seed = v.get<std::uint64_t>();
    } else {
      throw ConfigError("unknown profile key '" + key + "'");
    }
  }
  return p;
}

inline AttackSpec attack_spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("attack spec must be a JSON object");
  AttackSpec a;
  bool have_start = false;
  for (const auto& item : j.items()) {
    const std::string& key = item.key();
    const nlohmann::json& v = item.value();
    if (key == "start_ts") {
      if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
        throw ConfigError("'start_ts' must be a non-negative integer");
      }
      a.start_ts = v.get<std::int64_t>();
      have_start = true;
    } else if (key == "case") {
      if (!v.is_string()) throw ConfigError("'case' must be a string");
      const std::string s = v.get<std::string>();
      if (s == "case1") a.attack_case = AttackCase::case1;
      else if (s == "case2") a.attack_case = AttackCase::case2;
      else throw ConfigError("'case' must be \"case1\" or \"case2\"");
    } else if (key == "mean_interevent_min") {
      if (!v.is_number() || v.get<double>() <= 0) {
        throw ConfigError("'mean_interevent_min' must be a positive number");
      }
      a.mean_interevent_min = v.get<double>();
    } else if (key == "duration_min") {
      if (!v.is_number() || v.get<double>() <= 0) {
        throw ConfigError("'duration_min' must be a positive number");
      }
      a.duration_min = v.get<double>();
    } else if (key == "peers") {
      a.peers = detail::parse_string_pool(v, key);
    } else if (key == "domains") {
      a.domains = detail::parse_string_pool(v, key);
    } else if (key == "ssids") {
      a.ssids = detail::parse_string_pool(v, key);
    } else if (key == "rng_seed") {
      if (!v.is_number_integer()) throw ConfigError("'rng_seed' must be an integer");
      a.rng_seed = v.get<std::uint64_t>();
    } else {
      throw ConfigError("unknown attack spec key '" + key + "'");
    }
  }
  if (!have_start) throw ConfigError("attack spec requires 'start_ts'");
  if (a.peers.empty()) {
    for (int i = 1; i <= 8; ++i) a.peers.push_back("atk-peer-" + std::to_string(i));
  }
  if (a.domains.empty()) {
    for (int i = 1; i <= 8; ++i) a.domains.push_back("atk-domain-" + std::to_string(i));
  }
  if (a.ssids.empty()) {
    for (int i = 1; i <= 4; ++i) a.ssids.push_back("atk-ssid-" + std::to_string(i));
  }
  return a;
}

// Contacts corresponding to a profile: every identifier in the contact pool.
inline ContactList contacts_from_profile(const ProfileSpec& profile) {
  ContactList contacts;
  for (const WeightedId& w : profile.contact_pool) contacts.entries.insert(w.id);
  return contacts;
}

}  // namespace evauth
