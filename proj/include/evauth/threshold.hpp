#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "evauth/detail/format.hpp"
#include "evauth/errors.hpp"
#include "evauth/scoring.hpp"
#include "evauth/time.hpp"

namespace evauth {

enum class ThresholdStrategyKind {
  static_threshold,
  sd_block,
  ewma_direct,
  ewma_sd_block,
};

inline const char* to_string(ThresholdStrategyKind s) {
  switch (s) {
    case ThresholdStrategyKind::static_threshold: return "static";
    case ThresholdStrategyKind::sd_block: return "sd_block";
    case ThresholdStrategyKind::ewma_direct: return "ewma_direct";
    case ThresholdStrategyKind::ewma_sd_block: return "ewma_sd_block";
  }
  return "?";
}

inline std::optional<ThresholdStrategyKind> threshold_strategy_from_string(
    std::string_view s) {
  if (s == "static") return ThresholdStrategyKind::static_threshold;
  if (s == "sd_block") return ThresholdStrategyKind::sd_block;
  if (s == "ewma_direct") return ThresholdStrategyKind::ewma_direct;
  if (s == "ewma_sd_block") return ThresholdStrategyKind::ewma_sd_block;
  return std::nullopt;
}

struct ThresholdConfig {
  ThresholdStrategyKind strategy = ThresholdStrategyKind::ewma_direct;
  double alpha = 0.2;
  int block_len_events = 50;
  // Training window for static and ewma_sd_block: an event count when set,
  // otherwise a duration in days measured from the first score.
  std::optional<int> training_len_events;
  double training_len_days = 2.0;
  int asba_block_size = 8;
  // Population standard deviation by default; sample form is available for
  // sensitivity studies.
  bool sample_sd = false;
};

// Threshold applying to one aggregate score point. An empty value marks the
// strategy's training (warmup) prefix, during which no decision is issued.
struct ThresholdPoint {
  std::uint64_t index = 0;
  Timestamp ts = 0;
  std::optional<double> value;

  bool warmup() const { return !value.has_value(); }
};

struct BlockStats {
  double mean = 0.0;
  double sd = 0.0;
  std::size_t count = 0;
};

inline BlockStats compute_block_stats(const std::vector<double>& block,
                                      bool sample_sd = false) {
  BlockStats stats;
  stats.count = block.size();
  if (block.empty()) return stats;
  double sum = 0.0;
  for (double v : block) sum += v;
  stats.mean = sum / static_cast<double>(block.size());
  double sq = 0.0;
  for (double v : block) sq += (v - stats.mean) * (v - stats.mean);
  const double n = static_cast<double>(block.size());
  stats.sd = std::sqrt(sample_sd && block.size() > 1 ? sq / (n - 1.0) : sq / n);
  return stats;
}

// Threshold fitted once from a training block: mean minus standard
// deviation, frozen for the whole monitoring phase.
inline double static_fit(const std::vector<double>& training_scores,
                         bool sample_sd = false) {
  if (training_scores.size() < 2) {
    throw TrainingError("static threshold requires at least 2 training scores");
  }
  const BlockStats stats = compute_block_stats(training_scores, sample_sd);
  return stats.mean - stats.sd;
}

// Mean of a completed score block (the block-average input to the hybrid
// EWMA update).
inline double block_average(const std::vector<double>& block) {
  if (block.empty()) {
    throw ValidationError("block average requires a non-empty block");
  }
  double sum = 0.0;
  for (double v : block) sum += v;
  return sum / static_cast<double>(block.size());
}

// Consumes the aggregate score stream and produces exactly one threshold
// point per score point.
class ThresholdStrategy {
public:
  virtual ~ThresholdStrategy() = default;
  virtual ThresholdPoint observe(const AggregateScorePoint& point) = 0;
};

namespace detail {

// Collects the training prefix shared by the static and hybrid strategies.
// Event-count windows take the first N points; day windows take every point
// earlier than first_ts + days.
class TrainingWindow {
public:
  TrainingWindow(std::optional<int> events, double days)
      : events_(events), days_(days) {}

  bool is_training(const AggregateScorePoint& point) {
    if (events_) {
      if (static_cast<int>(scores_.size()) < *events_) {
        scores_.push_back(point.value);
        return true;
      }
      return false;
    }
    if (!end_ts_) {
      end_ts_ = point.ts +
                static_cast<Timestamp>(std::llround(days_ * 24.0 * kSecondsPerHour));
    }
    if (point.ts < *end_ts_) {
      scores_.push_back(point.value);
      return true;
    }
    return false;
  }

  const std::vector<double>& scores() const { return scores_; }

private:
  std::optional<int> events_;
  double days_;
  std::optional<Timestamp> end_ts_;
  std::vector<double> scores_;
};

}  // namespace detail

class StaticThreshold final : public ThresholdStrategy {
public:
  explicit StaticThreshold(const ThresholdConfig& cfg)
      : window_(cfg.training_len_events, cfg.training_len_days),
        sample_sd_(cfg.sample_sd) {}

  ThresholdPoint observe(const AggregateScorePoint& point) override {
    if (window_.is_training(point)) return {point.index, point.ts, std::nullopt};
    if (!value_) value_ = static_fit(window_.scores(), sample_sd_);
    return {point.index, point.ts, value_};
  }

private:
  detail::TrainingWindow window_;
  bool sample_sd_;
  std::optional<double> value_;
};

// Splits the score stream into consecutive equal-length blocks; each block's
// threshold is mean - sd of the block before it. The first block is the
// training prefix.
class SdBlockThreshold final : public ThresholdStrategy {
public:
  explicit SdBlockThreshold(const ThresholdConfig& cfg)
      : block_len_(cfg.block_len_events), sample_sd_(cfg.sample_sd) {}

  ThresholdPoint observe(const AggregateScorePoint& point) override {
    ThresholdPoint out{point.index, point.ts, value_};
    current_block_.push_back(point.value);
    if (static_cast<int>(current_block_.size()) == block_len_) {
      const BlockStats stats = compute_block_stats(current_block_, sample_sd_);
      value_ = stats.mean - stats.sd;
      current_block_.clear();
    }
    return out;
  }

private:
  int block_len_;
  bool sample_sd_;
  std::optional<double> value_;
  std::vector<double> current_block_;
};

// Training-free exponentially weighted moving average: the first threshold
// equals the first score, and every later threshold blends the previous
// score into the previous threshold.
class EwmaDirectThreshold final : public ThresholdStrategy {
public:
  explicit EwmaDirectThreshold(const ThresholdConfig& cfg) : alpha_(cfg.alpha) {}

  ThresholdPoint observe(const AggregateScorePoint& point) override {
    double value;
    if (!prev_threshold_) {
      value = point.value;
    } else {
      value = alpha_ * prev_score_ + (1.0 - alpha_) * *prev_threshold_;
    }
    prev_threshold_ = value;
    prev_score_ = point.value;
    return {point.index, point.ts, value};
  }

private:
  double alpha_;
  std::optional<double> prev_threshold_;
  double prev_score_ = 0.0;
};

// Hybrid strategy: mean - sd over a training block seeds the threshold,
// which is then EWMA-updated with the average of each completed score block.
// The updated threshold applies from the next block onward, so it is held
// constant within a block; a final partial block updates nothing.
class EwmaSdBlockThreshold final : public ThresholdStrategy {
public:
  explicit EwmaSdBlockThreshold(const ThresholdConfig& cfg)
      : window_(cfg.training_len_events, cfg.training_len_days),
        alpha_(cfg.alpha),
        block_size_(cfg.asba_block_size),
        sample_sd_(cfg.sample_sd) {}

  ThresholdPoint observe(const AggregateScorePoint& point) override {
    if (window_.is_training(point)) return {point.index, point.ts, std::nullopt};
    if (!value_) value_ = static_fit(window_.scores(), sample_sd_);
    ThresholdPoint out{point.index, point.ts, value_};
    current_block_.push_back(point.value);
    if (static_cast<int>(current_block_.size()) == block_size_) {
      value_ = alpha_ * block_average(current_block_) + (1.0 - alpha_) * *value_;
      current_block_.clear();
    }
    return out;
  }

private:
  detail::TrainingWindow window_;
  double alpha_;
  int block_size_;
  bool sample_sd_;
  std::optional<double> value_;
  std::vector<double> current_block_;
};

inline std::unique_ptr<ThresholdStrategy> make_strategy(const ThresholdConfig& cfg) {
  switch (cfg.strategy) {
    case ThresholdStrategyKind::static_threshold:
      return std::make_unique<StaticThreshold>(cfg);
    case ThresholdStrategyKind::sd_block:
      return std::make_unique<SdBlockThreshold>(cfg);
    case ThresholdStrategyKind::ewma_direct:
      return std::make_unique<EwmaDirectThreshold>(cfg);
    case ThresholdStrategyKind::ewma_sd_block:
      return std::make_unique<EwmaSdBlockThreshold>(cfg);
  }
  throw ConfigError("unknown threshold strategy");
}

// Aligned 1:1 with the aggregate score CSV.
inline void write_threshold_csv(std::ostream& out,
                                const std::vector<ThresholdPoint>& points) {
  out << "index,ts,threshold,warmup\n";
  for (const ThresholdPoint& p : points) {
    out << p.index << ',' << p.ts << ',';
    if (p.value) {
      out << detail::fixed6(*p.value) << ",0\n";
    } else {
      out << "warmup,1\n";
    }
  }
}

}  // namespace evauth
