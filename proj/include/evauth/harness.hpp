#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "evauth/config.hpp"
#include "evauth/decision.hpp"
#include "evauth/detail/format.hpp"
#include "evauth/errors.hpp"
#include "evauth/event.hpp"
#include "evauth/profile.hpp"
#include "evauth/rng.hpp"
#include "evauth/scoring.hpp"
#include "evauth/threshold.hpp"
#include "evauth/time.hpp"

namespace evauth {

namespace detail {

// Stream tags for sub-seed derivation; the values are arbitrary but frozen,
// since changing them changes every generated fixture.
enum StreamTag : std::uint64_t {
  kTagSmsIn = 1,
  kTagSmsOut = 2,
  kTagCallIn = 3,
  kTagCallOut = 4,
  kTagBrowser = 5,
  kTagWifi = 6,
  kTagAttack = 7,
};

struct IdentifierDrawer {
  const std::vector<WeightedId>* pool;
  double novelty_rate;
  std::string novel_prefix;
  std::uint64_t novel_counter = 0;
  std::vector<double> weights;

  IdentifierDrawer(const std::vector<WeightedId>& pool_in, double novelty,
                   std::string prefix)
      : pool(&pool_in), novelty_rate(novelty), novel_prefix(std::move(prefix)) {
    for (const WeightedId& w : *pool) weights.push_back(w.weight);
  }

  std::string draw(SeededRng& rng) {
    if (rng.uniform01() < novelty_rate || pool->empty()) {
      return novel_prefix + std::to_string(++novel_counter);
    }
    return (*pool)[rng.weighted_index(weights)].id;
  }
};

// Poisson arrival times over [from, to) at `per_day` events per day.
inline std::vector<Timestamp> arrival_times(SeededRng& rng, double per_day,
                                            Timestamp from, Timestamp to) {
  std::vector<Timestamp> times;
  if (per_day <= 0) return times;
  const double mean_gap_s = 24.0 * kSecondsPerHour / per_day;
  double t = static_cast<double>(from);
  for (;;) {
    t += rng.exponential(mean_gap_s);
    const auto ts = static_cast<Timestamp>(std::llround(t));
    if (ts >= to) break;
    times.push_back(ts);
  }
  return times;
}

inline void sort_by_ts(std::vector<Event>& events) {
  std::stable_sort(events.begin(), events.end(),
                   [](const Event& a, const Event& b) { return a.ts < b.ts; });
}

}  // namespace detail

// Deterministic synthetic legitimate-user log over [from, to). Each event
// kind is generated from an independently seeded sub-stream, then the
// streams are merged in timestamp order. Browser visits accumulate onto a
// fixed polling grid; polls with no visits are not emitted. Wifi sessions
// are stamped at disconnect and dropped if they would end at or after `to`.
inline EventLog generate_legitimate(const ProfileSpec& profile, Timestamp from,
                                    Timestamp to) {
  if (from >= to) throw ConfigError("generation span must satisfy start < end");
  const EventRates& rates = profile.daily_event_rate;
  const bool needs_pool = profile.novelty_rate < 1.0;
  if (needs_pool && profile.contact_pool.empty() &&
      (rates.sms_in > 0 || rates.sms_out > 0 || rates.call_in > 0 || rates.call_out > 0)) {
    throw ConfigError("contact_pool is empty but sms/call rates are positive");
  }
  if (needs_pool && profile.favorite_domains.empty() && rates.browser_visit > 0) {
    throw ConfigError("favorite_domains is empty but browser_visit rate is positive");
  }
  if (needs_pool && profile.favorite_ssids.empty() && rates.wifi_session > 0) {
    throw ConfigError("favorite_ssids is empty but wifi_session rate is positive");
  }

  std::vector<Event> events;

  struct PeerStream {
    EventKind kind;
    detail::StreamTag tag;
    double rate;
    const char* novel_prefix;
    bool with_duration;
  };
  const PeerStream peer_streams[] = {
      {EventKind::sms_in, detail::kTagSmsIn, rates.sms_in, "unknown-sms-in-", false},
      {EventKind::sms_out, detail::kTagSmsOut, rates.sms_out, "unknown-sms-out-", false},
      {EventKind::call_in, detail::kTagCallIn, rates.call_in, "unknown-call-in-", true},
      {EventKind::call_out, detail::kTagCallOut, rates.call_out, "unknown-call-out-", true},
  };
  for (const PeerStream& stream : peer_streams) {
    SeededRng rng(sub_seed(profile.rng_seed, stream.tag));
    detail::IdentifierDrawer drawer(profile.contact_pool, profile.novelty_rate,
                                    stream.novel_prefix);
    for (Timestamp ts : detail::arrival_times(rng, stream.rate, from, to)) {
      Event ev;
      ev.ts = ts;
      ev.kind = stream.kind;
      ev.peer = drawer.draw(rng);
      if (stream.with_duration) {
        ev.duration_s = std::llround(rng.exponential(profile.call_mean_duration_s));
      }
      events.push_back(std::move(ev));
    }
  }

  {
    SeededRng rng(sub_seed(profile.rng_seed, detail::kTagBrowser));
    detail::IdentifierDrawer drawer(profile.favorite_domains, profile.novelty_rate,
                                    "unknown-domain-");
    std::vector<std::pair<Timestamp, std::string>> visits;
    for (Timestamp ts : detail::arrival_times(rng, rates.browser_visit, from, to)) {
      visits.emplace_back(ts, drawer.draw(rng));
    }
    const Timestamp interval = profile.browser_poll_interval_s;
    std::size_t cursor = 0;
    for (Timestamp poll_ts = from + interval; poll_ts < to; poll_ts += interval) {
      Event ev;
      ev.ts = poll_ts;
      ev.kind = EventKind::browser_poll;
      while (cursor < visits.size() && visits[cursor].first <= poll_ts) {
        ev.domains.push_back(visits[cursor].second);
        ++cursor;
      }
      if (!ev.domains.empty()) events.push_back(std::move(ev));
    }
  }

  {
    SeededRng rng(sub_seed(profile.rng_seed, detail::kTagWifi));
    detail::IdentifierDrawer drawer(profile.favorite_ssids, profile.novelty_rate,
                                    "unknown-ssid-");
    for (Timestamp start : detail::arrival_times(rng, rates.wifi_session, from, to)) {
      const std::int64_t duration =
          std::llround(rng.exponential(profile.wifi_mean_duration_s));
      const Timestamp end = start + duration;
      if (end >= to) continue;
      Event ev;
      ev.ts = end;
      ev.kind = EventKind::wifi_session;
      ev.peer = drawer.draw(rng);
      ev.session_start = start;
      ev.duration_s = duration;
      events.push_back(std::move(ev));
    }
  }

  detail::sort_by_ts(events);
  return EventLog{std::move(events)};
}

// Attacker event stream from `spec.start_ts` for `duration_min` minutes at
// the case's cadence. Kinds are drawn uniformly from texting, calling,
// browsing and wifi use, with identifiers taken from the attacker pools.
inline std::vector<Event> generate_attack_events(const AttackSpec& spec) {
  // Attacker call/wifi duration shapes are fixed harness behavior, not
  // configuration: calls are short on average, wifi sessions long enough to
  // be scored rather than filtered.
  constexpr double kAttackCallMeanS = 90.0;
  constexpr double kAttackWifiMeanS = 600.0;
  constexpr std::int64_t kAttackWifiFloorS = 150;

  SeededRng rng(sub_seed(spec.rng_seed, detail::kTagAttack));
  const double mean_gap_s = spec.effective_mean_interevent_min() * 60.0;
  const double end = static_cast<double>(spec.start_ts) + spec.duration_min * 60.0;

  std::vector<Event> events;
  double t = static_cast<double>(spec.start_ts);
  for (;;) {
    t += rng.exponential(mean_gap_s);
    if (t >= end) break;
    const auto ts = static_cast<Timestamp>(std::llround(t));
    Event ev;
    ev.ts = ts;
    switch (rng.uniform_int(4)) {
      case 0:
        ev.kind = EventKind::sms_out;
        ev.peer = spec.peers[rng.uniform_int(spec.peers.size())];
        break;
      case 1:
        ev.kind = EventKind::call_out;
        ev.peer = spec.peers[rng.uniform_int(spec.peers.size())];
        ev.duration_s = std::llround(rng.exponential(kAttackCallMeanS));
        break;
      case 2: {
        ev.kind = EventKind::browser_poll;
        const std::uint64_t count = 1 + rng.uniform_int(3);
        for (std::uint64_t i = 0; i < count; ++i) {
          ev.domains.push_back(spec.domains[rng.uniform_int(spec.domains.size())]);
        }
        break;
      }
      default:
        ev.kind = EventKind::wifi_session;
        ev.peer = spec.ssids[rng.uniform_int(spec.ssids.size())];
        ev.duration_s = std::max<std::int64_t>(
            kAttackWifiFloorS, std::llround(rng.exponential(kAttackWifiMeanS)));
        ev.session_start = ts;
        ev.ts = ts + ev.duration_s;
        break;
    }
    events.push_back(std::move(ev));
  }
  detail::sort_by_ts(events);
  return events;
}

// Device-theft scenario: every legitimate event at or after the attack start
// disappears (the owner no longer holds the device) and attacker events take
// over. The merged log stays time-sorted.
inline EventLog inject_attack(const EventLog& log, const AttackSpec& spec) {
  if (log.events.empty()) {
    throw ValidationError("attack start is outside the log span: log is empty");
  }
  const Timestamp first = log.events.front().ts;
  const Timestamp last = log.events.back().ts;
  if (spec.start_ts < first || spec.start_ts > last) {
    throw ValidationError("attack start " + std::to_string(spec.start_ts) +
                          " is outside the log span [" + std::to_string(first) +
                          ", " + std::to_string(last) + "]");
  }
  EventLog out;
  for (const Event& ev : log.events) {
    if (ev.ts < spec.start_ts) out.events.push_back(ev);
  }
  for (Event& ev : generate_attack_events(spec)) {
    out.events.push_back(std::move(ev));
  }
  return out;
}

struct Metrics {
  // Fraction of non-warmup decisions classified normal over the legitimate
  // segment (the whole stream when no attack start is given); absent when
  // that segment holds no non-warmup decision.
  std::optional<double> recognition_rate;
  // Non-warmup decisions from the attack start through the first abnormal
  // verdict, inclusive; absent when the attack is never detected.
  std::optional<std::uint64_t> noc;
  // Minutes from the attack start to the first abnormal verdict.
  std::optional<double> elapsed_minutes;
  // Decision counts over the legitimate segment.
  std::uint64_t decisions_total = 0;
  std::uint64_t warmup_count = 0;
};

inline Metrics compute_metrics(const std::vector<DecisionRecord>& decisions,
                               std::optional<Timestamp> attack_start) {
  for (std::size_t i = 1; i < decisions.size(); ++i) {
    if (decisions[i].index <= decisions[i - 1].index ||
        decisions[i].ts < decisions[i - 1].ts) {
      throw ValidationError("decision stream is not in index order");
    }
  }
  Metrics m;
  std::uint64_t normal = 0;
  for (const DecisionRecord& rec : decisions) {
    if (attack_start && rec.ts >= *attack_start) break;
    ++m.decisions_total;
    if (rec.verdict == Verdict::warmup) {
      ++m.warmup_count;
    } else if (rec.verdict == Verdict::normal) {
      ++normal;
    }
  }
  if (m.decisions_total > m.warmup_count) {
    m.recognition_rate = static_cast<double>(normal) /
                         static_cast<double>(m.decisions_total - m.warmup_count);
  }
  if (attack_start) {
    std::uint64_t computations = 0;
    for (const DecisionRecord& rec : decisions) {
      if (rec.ts < *attack_start || rec.verdict == Verdict::warmup) continue;
      ++computations;
      if (rec.verdict == Verdict::abnormal) {
        m.noc = computations;
        m.elapsed_minutes = static_cast<double>(rec.ts - *attack_start) / 60.0;
        break;
      }
    }
  }
  return m;
}

struct ReplayResult {
  std::vector<AggregateScorePoint> scores;
  std::vector<ThresholdPoint> thresholds;
  std::vector<DecisionRecord> decisions;
  Metrics metrics;
};

// Full pipeline over one log: scoring -> threshold -> decision -> metrics.
// The log must validate cleanly before any processing happens.
inline ReplayResult replay(const EventLog& log, const ContactList& contacts,
                           const RunConfig& cfg) {
  const ValidationReport report = validate_log(log);
  if (!report.ok()) {
    throw ValidationError("event log failed validation: " + report.describe());
  }
  validate(cfg);

  ReplayResult result;
  ScoringEngine engine(contacts, cfg.weights, cfg.damping, cfg.caches);
  auto strategy = make_strategy(cfg.threshold);
  for (const Event& ev : log.events) {
    auto point = engine.process(ev);
    if (!point) continue;
    ThresholdPoint threshold = strategy->observe(*point);
    result.decisions.push_back(make_decision(*point, threshold, cfg.decision));
    result.scores.push_back(*point);
    result.thresholds.push_back(std::move(threshold));
  }
  result.metrics = compute_metrics(result.decisions, cfg.attack_start);
  return result;
}

inline nlohmann::json metrics_to_json(const Metrics& m) {
  nlohmann::json j;
  j["recognition_rate"] = m.recognition_rate ? nlohmann::json(*m.recognition_rate)
                                             : nlohmann::json(nullptr);
  j["noc"] = m.noc ? nlohmann::json(*m.noc) : nlohmann::json(nullptr);
  j["elapsed_minutes"] = m.elapsed_minutes ? nlohmann::json(*m.elapsed_minutes)
                                           : nlohmann::json(nullptr);
  j["decisions_total"] = m.decisions_total;
  j["warmup_count"] = m.warmup_count;
  return j;
}

// A sweepable parameter: its grid key and how it lands in the config.
inline const std::vector<std::string>& sweep_parameter_order() {
  static const std::vector<std::string> order = {
      "tolerance", "alpha", "asba_block_size", "training_len", "block_len_events"};
  return order;
}

struct SweepGrid {
  // Parameter name -> values, held in canonical column order.
  std::vector<std::pair<std::string, std::vector<double>>> axes;
};

inline SweepGrid sweep_grid_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("sweep grid must be a JSON object");
  SweepGrid grid;
  for (const std::string& name : sweep_parameter_order()) {
    if (!j.contains(name)) continue;
    const auto& v = j.at(name);
    if (!v.is_array() || v.empty()) {
      throw ConfigError("grid parameter '" + name + "' must be a non-empty array");
    }
    std::vector<double> values;
    for (const auto& entry : v) {
      if (!entry.is_number()) {
        throw ConfigError("grid parameter '" + name + "' must hold numbers");
      }
      values.push_back(entry.get<double>());
    }
    grid.axes.emplace_back(name, std::move(values));
  }
  for (const auto& item : j.items()) {
    const auto& order = sweep_parameter_order();
    if (std::find(order.begin(), order.end(), item.key()) == order.end()) {
      throw ConfigError("unknown sweep parameter '" + item.key() + "'");
    }
  }
  if (grid.axes.empty()) throw ConfigError("sweep grid is empty");
  return grid;
}

namespace detail {

inline void apply_sweep_parameter(RunConfig& cfg, const std::string& name,
                                  double value) {
  auto as_positive_int = [&](const char* what) {
    const auto n = static_cast<int>(std::llround(value));
    if (static_cast<double>(n) != value || n < 1) {
      throw ConfigError(std::string("grid parameter '") + what +
                        "' requires positive integers");
    }
    return n;
  };
  if (name == "tolerance") {
    cfg.decision.tolerance = value;
  } else if (name == "alpha") {
    cfg.threshold.alpha = value;
  } else if (name == "asba_block_size") {
    cfg.threshold.asba_block_size = as_positive_int("asba_block_size");
  } else if (name == "training_len") {
    cfg.threshold.training_len_events = as_positive_int("training_len");
  } else if (name == "block_len_events") {
    cfg.threshold.block_len_events = as_positive_int("block_len_events");
  } else {
    throw ConfigError("unknown sweep parameter '" + name + "'");
  }
}

}  // namespace detail

struct SweepRow {
  std::vector<std::pair<std::string, double>> assignment;
  Metrics metrics;
};

// One replay per grid point (Cartesian product of the axes, rightmost axis
// fastest). Rows follow grid order.
inline std::vector<SweepRow> sweep(const EventLog& log, const ContactList& contacts,
                                   const RunConfig& base, const SweepGrid& grid) {
  std::vector<SweepRow> rows;
  std::vector<std::size_t> pos(grid.axes.size(), 0);
  for (;;) {
    SweepRow row;
    RunConfig cfg = base;
    for (std::size_t i = 0; i < grid.axes.size(); ++i) {
      const auto& [name, values] = grid.axes[i];
      detail::apply_sweep_parameter(cfg, name, values[pos[i]]);
      row.assignment.emplace_back(name, values[pos[i]]);
    }
    validate(cfg);
    row.metrics = replay(log, contacts, cfg).metrics;
    rows.push_back(std::move(row));

    std::size_t axis = grid.axes.size();
    while (axis > 0) {
      --axis;
      if (++pos[axis] < grid.axes[axis].second.size()) break;
      pos[axis] = 0;
      if (axis == 0) return rows;
    }
    if (grid.axes.empty()) return rows;
  }
}

inline void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  if (rows.empty()) return;
  for (std::size_t i = 0; i < rows.front().assignment.size(); ++i) {
    out << rows.front().assignment[i].first << ',';
  }
  out << "recognition_rate,noc,elapsed_minutes\n";
  for (const SweepRow& row : rows) {
    for (const auto& [name, value] : row.assignment) {
      out << name << '=';
      if (value == std::floor(value) && std::abs(value) < 1e15) {
        out << static_cast<std::int64_t>(value);
      } else {
        out << nlohmann::json(value).dump();
      }
      out << ',';
    }
    if (row.metrics.recognition_rate) {
      out << detail::fixed6(*row.metrics.recognition_rate);
    } else {
      out << "NA";
    }
    out << ',';
    if (row.metrics.noc) {
      out << *row.metrics.noc;
    } else {
      out << "NA";
    }
    out << ',';
    if (row.metrics.elapsed_minutes) {
      out << detail::fixed6(*row.metrics.elapsed_minutes);
    } else {
      out << "NA";
    }
    out << '\n';
  }
}

}  // namespace evauth
