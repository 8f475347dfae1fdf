#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "evauth/detail/format.hpp"
#include "evauth/errors.hpp"
#include "evauth/event.hpp"
#include "evauth/priority_cache.hpp"
#include "evauth/time.hpp"

namespace evauth {

// Condition points awarded per event kind. All values are configurable; the
// defaults keep the per-feature maxima within the same order of magnitude so
// no single feature dominates the aggregate.
struct ScoreWeights {
  double sms_top5_points = 15.0;
  double sms_contact_points = 10.0;
  double call_top5_points = 15.0;
  double call_contact_points = 10.0;
  double call_long_duration_points = 10.0;
  std::int64_t call_long_duration_threshold_s = 120;
  double browser_per_domain_points = 5.0;
  int browser_top_k = 6;
  double wifi_top5_points = 20.0;
  std::int64_t wifi_min_session_s = 120;
  int sms_call_top_k = 5;
};

// Linear decay applied to stored feature scores between events, in points
// per hour. Scores floor at zero.
struct DampingConfig {
  double mu = 0.5;
};

enum class Feature { sms = 0, call = 1, browser = 2, wifi = 3 };
inline constexpr std::size_t kFeatureCount = 4;

inline const char* to_string(Feature f) {
  switch (f) {
    case Feature::sms: return "sms";
    case Feature::call: return "call";
    case Feature::browser: return "browser";
    case Feature::wifi: return "wifi";
  }
  return "?";
}

struct FeatureSlot {
  double score = 0.0;
  Timestamp last_update = 0;
  PriorityCache cache;
};

// The four per-feature scoring slots. Scores stay non-negative; damping
// floors at zero.
struct FeatureState {
  std::array<FeatureSlot, kFeatureCount> slots;

  FeatureSlot& slot(Feature f) { return slots[static_cast<std::size_t>(f)]; }
  const FeatureSlot& slot(Feature f) const {
    return slots[static_cast<std::size_t>(f)];
  }
};

// One element of the aggregate score stream, emitted per qualifying event.
// feature_scores holds the per-feature decomposition (sms, call, browser,
// wifi) whose sum is value.
struct AggregateScorePoint {
  std::uint64_t index = 0;  // 1-based
  Timestamp ts = 0;
  double value = 0.0;
  std::array<double, kFeatureCount> feature_scores{};
};

// Decays every stored feature score by mu points per elapsed hour, floored
// at zero, and advances last_update to `now`.
inline void apply_damping(FeatureState& state, Timestamp now,
                          const DampingConfig& cfg) {
  for (FeatureSlot& slot : state.slots) {
    if (now < slot.last_update) {
      throw ClockRegressionError("damping applied before the last update");
    }
    slot.score = std::max(0.0, slot.score - cfg.mu * hours_between(slot.last_update, now));
    slot.last_update = now;
  }
}

// SMS conditions: peer ranked in the top 5 of the cache (checked before this
// occurrence is recorded so a never-seen peer cannot score via its own
// arrival) and peer known to the contact list. Records the occurrence.
inline double score_sms(const Event& event, PriorityCache& cache,
                        const ContactList& contacts, const ScoreWeights& w,
                        Timestamp now) {
  double score = 0.0;
  const auto top = cache.top_k(static_cast<std::size_t>(w.sms_call_top_k), now);
  if (std::find(top.begin(), top.end(), event.peer) != top.end()) {
    score += w.sms_top5_points;
  }
  if (contacts.contains(event.peer)) {
    score += w.sms_contact_points;
  }
  cache.prune_expired(now);
  cache.record_occurrence(event.peer, now);
  return score;
}

// Calls share the SMS conditions (against the call cache) plus a bonus for
// long calls, which indicate familiar use.
inline double score_call(const Event& event, PriorityCache& cache,
                         const ContactList& contacts, const ScoreWeights& w,
                         Timestamp now) {
  double score = 0.0;
  const auto top = cache.top_k(static_cast<std::size_t>(w.sms_call_top_k), now);
  if (std::find(top.begin(), top.end(), event.peer) != top.end()) {
    score += w.call_top5_points;
  }
  if (contacts.contains(event.peer)) {
    score += w.call_contact_points;
  }
  if (event.duration_s >= w.call_long_duration_threshold_s) {
    score += w.call_long_duration_points;
  }
  cache.prune_expired(now);
  cache.record_occurrence(event.peer, now);
  return score;
}

// Scores a poll by how many of its distinct domains sit in the cache's top 6,
// snapshotted before any of the poll's occurrences are recorded. Each
// distinct domain in the poll is then recorded once.
inline double score_browser_poll(const Event& event, PriorityCache& cache,
                                 const ScoreWeights& w, Timestamp now) {
  const auto top = cache.top_k(static_cast<std::size_t>(w.browser_top_k), now);
  std::set<std::string> top_set(top.begin(), top.end());

  std::vector<std::string> distinct;
  std::set<std::string> seen;
  for (const std::string& d : event.domains) {
    if (seen.insert(d).second) distinct.push_back(d);
  }

  double score = 0.0;
  for (const std::string& d : distinct) {
    if (top_set.count(d)) score += w.browser_per_domain_points;
  }
  cache.prune_expired(now);
  for (const std::string& d : distinct) {
    cache.record_occurrence(d, now);
  }
  return score;
}

// Sessions shorter than the minimum are treated as non-events: no score and
// no cache update (filters automatic short connections made on the move).
inline std::optional<double> score_wifi_session(const Event& event,
                                                PriorityCache& cache,
                                                const ScoreWeights& w,
                                                Timestamp now) {
  if (event.duration_s < w.wifi_min_session_s) return std::nullopt;
  double score = 0.0;
  const auto top = cache.top_k(static_cast<std::size_t>(w.sms_call_top_k), now);
  if (std::find(top.begin(), top.end(), event.peer) != top.end()) {
    score += w.wifi_top5_points;
  }
  cache.prune_expired(now);
  cache.record_occurrence(event.peer, now);
  return score;
}

// Cache decay parameters per feature. SMS and calls keep separate caches
// with identical parameters; incoming and outgoing share one per feature.
struct CacheParamsSet {
  CacheParams sms{120.0, 48.0};
  CacheParams call{120.0, 48.0};
  CacheParams browser{72.0, 8.0};
  CacheParams wifi{100.0, 18.0};
};

// Sequential stream scorer. For each event it damps all stored feature
// scores to the event time, recomputes the triggered feature's score
// (replacing, not accumulating), and emits the sum of the four scores as the
// next aggregate score point. Empty browser polls and sub-minimum wifi
// sessions damp the state but emit nothing.
class ScoringEngine {
public:
  ScoringEngine(ContactList contacts, ScoreWeights weights, DampingConfig damping,
                CacheParamsSet cache_params = {})
      : contacts_(std::move(contacts)), weights_(weights), damping_(damping) {
    state_.slot(Feature::sms).cache = PriorityCache(cache_params.sms);
    state_.slot(Feature::call).cache = PriorityCache(cache_params.call);
    state_.slot(Feature::browser).cache = PriorityCache(cache_params.browser);
    state_.slot(Feature::wifi).cache = PriorityCache(cache_params.wifi);
  }

  std::optional<AggregateScorePoint> process(const Event& event) {
    if (event.ts < last_event_ts_) {
      throw ClockRegressionError("event timestamp precedes the last processed event");
    }
    last_event_ts_ = event.ts;
    apply_damping(state_, event.ts, damping_);

    bool emit = true;
    switch (event.kind) {
      case EventKind::sms_in:
      case EventKind::sms_out: {
        FeatureSlot& s = state_.slot(Feature::sms);
        s.score = score_sms(event, s.cache, contacts_, weights_, event.ts);
        break;
      }
      case EventKind::call_in:
      case EventKind::call_out: {
        FeatureSlot& s = state_.slot(Feature::call);
        s.score = score_call(event, s.cache, contacts_, weights_, event.ts);
        break;
      }
      case EventKind::browser_poll: {
        if (event.domains.empty()) {
          emit = false;
          break;
        }
        FeatureSlot& s = state_.slot(Feature::browser);
        s.score = score_browser_poll(event, s.cache, weights_, event.ts);
        break;
      }
      case EventKind::wifi_session: {
        FeatureSlot& s = state_.slot(Feature::wifi);
        if (auto score = score_wifi_session(event, s.cache, weights_, event.ts)) {
          s.score = *score;
        } else {
          emit = false;
        }
        break;
      }
    }
    if (!emit) return std::nullopt;

    AggregateScorePoint point;
    point.index = next_index_++;
    point.ts = event.ts;
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
      point.feature_scores[i] = state_.slots[i].score;
      point.value += state_.slots[i].score;
    }
    return point;
  }

  const FeatureState& feature_state() const { return state_; }
  const ContactList& contacts() const { return contacts_; }

private:
  ContactList contacts_;
  ScoreWeights weights_;
  DampingConfig damping_;
  FeatureState state_;
  Timestamp last_event_ts_ = -1;
  std::uint64_t next_index_ = 1;
};

inline void write_as_csv(std::ostream& out,
                         const std::vector<AggregateScorePoint>& points) {
  out << "index,ts,sms_score,call_score,browser_score,wifi_score,aggregate_score\n";
  for (const AggregateScorePoint& p : points) {
    out << p.index << ',' << p.ts;
    for (double s : p.feature_scores) out << ',' << detail::fixed6(s);
    out << ',' << detail::fixed6(p.value) << '\n';
  }
}

}  // namespace evauth
