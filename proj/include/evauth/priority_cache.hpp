#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "evauth/errors.hpp"
#include "evauth/time.hpp"

namespace evauth {

// Linear-decay parameters of a relevance value: base + weight * count - hours.
struct CacheParams {
  double base = 0.0;
  double weight = 0.0;
};

struct CacheEntry {
  std::uint64_t occurrence_count = 0;
  Timestamp last_seen = 0;
};

inline double current_value(const CacheEntry& entry, Timestamp now,
                            const CacheParams& params) {
  if (now < entry.last_seen) {
    throw ClockRegressionError("cache value queried before the entry was last seen");
  }
  return params.base + params.weight * static_cast<double>(entry.occurrence_count) -
         hours_between(entry.last_seen, now);
}

// Per-feature relevance cache. Each identifier carries an occurrence count
// and the time it was last seen; its value decays linearly at one point per
// hour. Entries whose value drops below zero are pruned and lose their
// occurrence history; a pruned identifier re-enters with a count of 1.
class PriorityCache {
public:
  PriorityCache() = default;
  explicit PriorityCache(CacheParams params) : params_(params) {}

  const CacheParams& params() const { return params_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  const CacheEntry* find(const std::string& id) const {
    auto it = entries_.find(id);
    return it == entries_.end() ? nullptr : &it->second;
  }

  // Monotone replay contract: `now` must not precede any resident entry.
  void record_occurrence(const std::string& id, Timestamp now) {
    if (!entries_.empty() && now < max_last_seen_) {
      throw ClockRegressionError("occurrence recorded before an existing entry");
    }
    auto [it, inserted] = entries_.try_emplace(id, CacheEntry{1, now});
    if (!inserted) {
      it->second.occurrence_count += 1;
      it->second.last_seen = now;
    }
    max_last_seen_ = std::max(max_last_seen_, now);
  }

  // Removes entries whose value at `now` is strictly negative. A value of
  // exactly zero is retained. Idempotent at fixed `now`.
  void prune_expired(Timestamp now) {
    for (auto it = entries_.begin(); it != entries_.end();) {
      if (raw_value(it->second, now) < 0.0) {
        it = entries_.erase(it);
      } else {
        ++it;
      }
    }
    max_last_seen_ = std::numeric_limits<Timestamp>::min();
    for (const auto& [id, entry] : entries_) {
      max_last_seen_ = std::max(max_last_seen_, entry.last_seen);
    }
  }

  // Identifiers of the k highest-valued entries at `now`. Entries whose value
  // would already have been pruned (strictly negative) never appear. Ties
  // break on higher occurrence count, then more recent last_seen, then
  // lexicographically smaller identifier. Does not mutate the cache.
  std::vector<std::string> top_k(std::size_t k, Timestamp now) const {
    if (k == 0) return {};
    struct Ranked {
      double value;
      std::uint64_t count;
      Timestamp last_seen;
      const std::string* id;
    };
    std::vector<Ranked> ranked;
    ranked.reserve(entries_.size());
    for (const auto& [id, entry] : entries_) {
      double value = raw_value(entry, now);
      if (value < 0.0) continue;
      ranked.push_back({value, entry.occurrence_count, entry.last_seen, &id});
    }
    std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
      return std::tie(b.value, b.count, b.last_seen, *a.id) <
             std::tie(a.value, a.count, a.last_seen, *b.id);
    });
    if (ranked.size() > k) ranked.resize(k);
    std::vector<std::string> ids;
    ids.reserve(ranked.size());
    for (const Ranked& r : ranked) ids.push_back(*r.id);
    return ids;
  }

  // Debug/golden-test dump: {id: {"ot": n, "last_seen": ts}}, sorted by id.
  nlohmann::json dump() const {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [id, entry] : entries_) {
      j[id] = {{"ot", entry.occurrence_count}, {"last_seen", entry.last_seen}};
    }
    return j;
  }

private:
  // Value without the clock-regression guard; a negative delta only inflates
  // the value, which keeps prune/top_k total.
  double raw_value(const CacheEntry& entry, Timestamp now) const {
    return params_.base + params_.weight * static_cast<double>(entry.occurrence_count) -
           hours_between(entry.last_seen, now);
  }

  CacheParams params_;
  std::map<std::string, CacheEntry> entries_;
  Timestamp max_last_seen_ = std::numeric_limits<Timestamp>::min();
};

}  // namespace evauth
