#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "evauth/decision.hpp"
#include "evauth/errors.hpp"
#include "evauth/scoring.hpp"
#include "evauth/threshold.hpp"
#include "evauth/time.hpp"

namespace evauth {

// Full engine configuration. Default-constructed values are the documented
// defaults; the JSON form is a single flat object of dotted keys
// (e.g. "threshold.alpha": 0.2). Unknown keys are rejected.
struct RunConfig {
  ScoreWeights weights;
  DampingConfig damping;
  CacheParamsSet caches;
  ThresholdConfig threshold;
  DecisionConfig decision;
  // Consulted by metric computation: decisions at or after this instant are
  // treated as the adversary segment.
  std::optional<Timestamp> attack_start;
};

namespace detail {

inline double cfg_number(const nlohmann::json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError("config key '" + key + "' must be a number");
  return v.get<double>();
}

inline std::int64_t cfg_integer(const nlohmann::json& v, const std::string& key) {
  if (!v.is_number_integer()) {
    throw ConfigError("config key '" + key + "' must be an integer");
  }
  return v.get<std::int64_t>();
}

inline bool cfg_bool(const nlohmann::json& v, const std::string& key) {
  if (!v.is_boolean()) throw ConfigError("config key '" + key + "' must be a boolean");
  return v.get<bool>();
}

}  // namespace detail

inline void validate(const RunConfig& cfg) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(what);
  };
  const ScoreWeights& w = cfg.weights;
  require(w.sms_top5_points >= 0 && w.sms_contact_points >= 0 &&
              w.call_top5_points >= 0 && w.call_contact_points >= 0 &&
              w.call_long_duration_points >= 0 && w.browser_per_domain_points >= 0 &&
              w.wifi_top5_points >= 0,
          "condition point values must be >= 0");
  require(w.call_long_duration_threshold_s >= 0 && w.wifi_min_session_s >= 0,
          "duration thresholds must be >= 0");
  require(w.browser_top_k >= 1 && w.sms_call_top_k >= 1, "top-k sizes must be >= 1");
  require(cfg.damping.mu >= 0, "damping.mu must be >= 0");
  for (const CacheParams* p :
       {&cfg.caches.sms, &cfg.caches.call, &cfg.caches.browser, &cfg.caches.wifi}) {
    require(p->base > 0, "cache base must be > 0");
    require(p->weight >= 0, "cache weight must be >= 0");
  }
  const ThresholdConfig& t = cfg.threshold;
  require(t.alpha > 0 && t.alpha <= 1, "threshold.alpha must be in (0, 1]");
  require(t.block_len_events >= 1, "threshold.block_len_events must be >= 1");
  require(t.asba_block_size >= 1, "threshold.asba_block_size must be >= 1");
  require(!t.training_len_events || *t.training_len_events >= 1,
          "threshold.training_len_events must be >= 1");
  require(t.training_len_days > 0, "threshold.training_len_days must be > 0");
  require(cfg.decision.tolerance >= 0, "decision.tolerance must be >= 0");
  require(!cfg.attack_start || *cfg.attack_start >= 0,
          "attack.start_ts must be non-negative");
}

// Applies a flat dotted-key JSON object on top of `base`. Every key is
// optional; unrecognized keys and wrong value types are errors.
inline RunConfig run_config_from_json(const nlohmann::json& j,
                                      RunConfig base = RunConfig{}) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  RunConfig cfg = base;
  using detail::cfg_bool;
  using detail::cfg_integer;
  using detail::cfg_number;
  for (const auto& item : j.items()) {
    const std::string& key = item.key();
    const nlohmann::json& v = item.value();
    if (key == "weights.sms_top5_points") {
      cfg.weights.sms_top5_points = cfg_number(v, key);
    } else if (key == "weights.sms_contact_points") {
      cfg.weights.sms_contact_points = cfg_number(v, key);
    } else if (key == "weights.call_top5_points") {
      cfg.weights.call_top5_points = cfg_number(v, key);
    } else if (key == "weights.call_contact_points") {
      cfg.weights.call_contact_points = cfg_number(v, key);
    } else if (key == "weights.call_long_duration_points") {
      cfg.weights.call_long_duration_points = cfg_number(v, key);
    } else if (key == "weights.call_long_duration_threshold_s") {
      cfg.weights.call_long_duration_threshold_s = cfg_integer(v, key);
    } else if (key == "weights.browser_per_domain_points") {
      cfg.weights.browser_per_domain_points = cfg_number(v, key);
    } else if (key == "weights.browser_top_k") {
      cfg.weights.browser_top_k = static_cast<int>(cfg_integer(v, key));
    } else if (key == "weights.wifi_top5_points") {
      cfg.weights.wifi_top5_points = cfg_number(v, key);
    } else if (key == "weights.wifi_min_session_s") {
      cfg.weights.wifi_min_session_s = cfg_integer(v, key);
    } else if (key == "weights.sms_call_top_k") {
      cfg.weights.sms_call_top_k = static_cast<int>(cfg_integer(v, key));
    } else if (key == "damping.mu") {
      cfg.damping.mu = cfg_number(v, key);
    } else if (key == "cache.sms.base") {
      cfg.caches.sms.base = cfg_number(v, key);
    } else if (key == "cache.sms.weight") {
      cfg.caches.sms.weight = cfg_number(v, key);
    } else if (key == "cache.call.base") {
      cfg.caches.call.base = cfg_number(v, key);
    } else if (key == "cache.call.weight") {
      cfg.caches.call.weight = cfg_number(v, key);
    } else if (key == "cache.browser.base") {
      cfg.caches.browser.base = cfg_number(v, key);
    } else if (key == "cache.browser.weight") {
      cfg.caches.browser.weight = cfg_number(v, key);
    } else if (key == "cache.wifi.base") {
      cfg.caches.wifi.base = cfg_number(v, key);
    } else if (key == "cache.wifi.weight") {
      cfg.caches.wifi.weight = cfg_number(v, key);
    } else if (key == "threshold.strategy") {
      if (!v.is_string()) throw ConfigError("config key 'threshold.strategy' must be a string");
      auto s = threshold_strategy_from_string(v.get<std::string>());
      if (!s) {
        throw ConfigError("unknown threshold.strategy '" + v.get<std::string>() +
                          "' (expected static, sd_block, ewma_direct, ewma_sd_block)");
      }
      cfg.threshold.strategy = *s;
    } else if (key == "threshold.alpha") {
      cfg.threshold.alpha = cfg_number(v, key);
    } else if (key == "threshold.block_len_events") {
      cfg.threshold.block_len_events = static_cast<int>(cfg_integer(v, key));
    } else if (key == "threshold.training_len_events") {
      if (v.is_null()) {
        cfg.threshold.training_len_events.reset();
      } else {
        cfg.threshold.training_len_events = static_cast<int>(cfg_integer(v, key));
      }
    } else if (key == "threshold.training_len_days") {
      cfg.threshold.training_len_days = cfg_number(v, key);
    } else if (key == "threshold.asba_block_size") {
      cfg.threshold.asba_block_size = static_cast<int>(cfg_integer(v, key));
    } else if (key == "threshold.sample_sd") {
      cfg.threshold.sample_sd = cfg_bool(v, key);
    } else if (key == "decision.tolerance") {
      cfg.decision.tolerance = cfg_number(v, key);
    } else if (key == "attack.start_ts") {
      if (v.is_null()) {
        cfg.attack_start.reset();
      } else {
        cfg.attack_start = cfg_integer(v, key);
      }
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  validate(cfg);
  return cfg;
}

// Emits every key, including ones still at their default, so a dump is a
// complete reference of the effective configuration.
inline nlohmann::json run_config_to_json(const RunConfig& cfg) {
  nlohmann::json j;
  j["weights.sms_top5_points"] = cfg.weights.sms_top5_points;
  j["weights.sms_contact_points"] = cfg.weights.sms_contact_points;
  j["weights.call_top5_points"] = cfg.weights.call_top5_points;
  j["weights.call_contact_points"] = cfg.weights.call_contact_points;
  j["weights.call_long_duration_points"] = cfg.weights.call_long_duration_points;
  j["weights.call_long_duration_threshold_s"] = cfg.weights.call_long_duration_threshold_s;
  j["weights.browser_per_domain_points"] = cfg.weights.browser_per_domain_points;
  j["weights.browser_top_k"] = cfg.weights.browser_top_k;
  j["weights.wifi_top5_points"] = cfg.weights.wifi_top5_points;
  j["weights.wifi_min_session_s"] = cfg.weights.wifi_min_session_s;
  j["weights.sms_call_top_k"] = cfg.weights.sms_call_top_k;
  j["damping.mu"] = cfg.damping.mu;
  j["cache.sms.base"] = cfg.caches.sms.base;
  j["cache.sms.weight"] = cfg.caches.sms.weight;
  j["cache.call.base"] = cfg.caches.call.base;
  j["cache.call.weight"] = cfg.caches.call.weight;
  j["cache.browser.base"] = cfg.caches.browser.base;
  j["cache.browser.weight"] = cfg.caches.browser.weight;
  j["cache.wifi.base"] = cfg.caches.wifi.base;
  j["cache.wifi.weight"] = cfg.caches.wifi.weight;
  j["threshold.strategy"] = to_string(cfg.threshold.strategy);
  j["threshold.alpha"] = cfg.threshold.alpha;
  j["threshold.block_len_events"] = cfg.threshold.block_len_events;
  if (cfg.threshold.training_len_events) {
    j["threshold.training_len_events"] = *cfg.threshold.training_len_events;
  } else {
    j["threshold.training_len_events"] = nullptr;
  }
  j["threshold.training_len_days"] = cfg.threshold.training_len_days;
  j["threshold.asba_block_size"] = cfg.threshold.asba_block_size;
  j["threshold.sample_sd"] = cfg.threshold.sample_sd;
  j["decision.tolerance"] = cfg.decision.tolerance;
  if (cfg.attack_start) {
    j["attack.start_ts"] = *cfg.attack_start;
  } else {
    j["attack.start_ts"] = nullptr;
  }
  return j;
}

inline nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

inline RunConfig load_run_config_file(const std::filesystem::path& path) {
  return run_config_from_json(read_json_file(path));
}

}  // namespace evauth
