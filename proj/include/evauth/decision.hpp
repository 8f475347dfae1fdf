#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "evauth/detail/format.hpp"
#include "evauth/threshold.hpp"
#include "evauth/time.hpp"

namespace evauth {

// Error tolerance V: scores within V points below the threshold (the band
// between the virtual threshold and the threshold) still count as normal.
struct DecisionConfig {
  double tolerance = 10.0;
};

enum class Verdict { normal, abnormal, warmup };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::normal: return "normal";
    case Verdict::abnormal: return "abnormal";
    case Verdict::warmup: return "warmup";
  }
  return "?";
}

// Pure, total classification of one aggregate score against its threshold.
// A score equal to the threshold is normal, which keeps V = 0 well-defined
// as the plain comparison score >= threshold.
inline Verdict classify(double aggregate_score, std::optional<double> threshold,
                        const DecisionConfig& cfg) {
  if (!threshold) return Verdict::warmup;
  const double t = *threshold;
  if (aggregate_score >= t) return Verdict::normal;
  if (t - cfg.tolerance <= aggregate_score && aggregate_score < t) {
    return Verdict::normal;
  }
  return Verdict::abnormal;
}

struct DecisionRecord {
  std::uint64_t index = 0;
  Timestamp ts = 0;
  double aggregate_score = 0.0;
  std::optional<double> threshold;
  std::optional<double> virtual_threshold;  // threshold - V when not warmup
  Verdict verdict = Verdict::warmup;
};

inline DecisionRecord make_decision(const AggregateScorePoint& score,
                                    const ThresholdPoint& threshold,
                                    const DecisionConfig& cfg) {
  DecisionRecord rec;
  rec.index = score.index;
  rec.ts = score.ts;
  rec.aggregate_score = score.value;
  rec.threshold = threshold.value;
  if (threshold.value) rec.virtual_threshold = *threshold.value - cfg.tolerance;
  rec.verdict = classify(score.value, threshold.value, cfg);
  return rec;
}

inline void write_decision_csv(std::ostream& out,
                               const std::vector<DecisionRecord>& records) {
  out << "index,ts,aggregate_score,threshold,virtual_threshold,verdict\n";
  for (const DecisionRecord& r : records) {
    out << r.index << ',' << r.ts << ',' << detail::fixed6(r.aggregate_score) << ',';
    if (r.threshold) {
      out << detail::fixed6(*r.threshold) << ',' << detail::fixed6(*r.virtual_threshold);
    } else {
      out << "warmup,warmup";
    }
    out << ',' << to_string(r.verdict) << '\n';
  }
}

}  // namespace evauth
