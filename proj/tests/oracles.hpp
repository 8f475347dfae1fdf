// Independent reference implementations used to check the engine. These are
// deliberately naive (direct summation, batch recomputation) and must stay
// decoupled from the streaming implementations they verify.
#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

namespace oracle {

// Closed-form EWMA threshold for 1-based index t:
//   T_t = alpha * sum_{j=1}^{t-1} (1-alpha)^(t-1-j) * s_j + (1-alpha)^(t-1) * s_1
inline double ewma_closed_form(const std::vector<double>& scores, double alpha,
                               std::size_t t) {
  double acc = 0.0;
  for (std::size_t j = 1; j + 1 <= t; ++j) {
    acc += alpha * std::pow(1.0 - alpha, static_cast<double>(t - 1 - j)) * scores[j - 1];
  }
  acc += std::pow(1.0 - alpha, static_cast<double>(t - 1)) * scores[0];
  return acc;
}

inline double population_mean(const std::vector<double>& xs) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

inline double population_sd(const std::vector<double>& xs) {
  const double mean = population_mean(xs);
  double sq = 0.0;
  for (double x : xs) sq += (x - mean) * (x - mean);
  return std::sqrt(sq / static_cast<double>(xs.size()));
}

// Batch recomputation of the block threshold for 1-based index i under block
// length L: empty during the first block, otherwise mean - sd of the full
// previous block.
inline std::optional<double> sd_block_expected(const std::vector<double>& scores,
                                               std::size_t block_len, std::size_t i) {
  const std::size_t block_idx = (i - 1) / block_len;  // 0-based block number
  if (block_idx == 0) return std::nullopt;
  const std::size_t begin = (block_idx - 1) * block_len;
  const std::vector<double> prev(scores.begin() + begin, scores.begin() + begin + block_len);
  return population_mean(prev) - population_sd(prev);
}

enum class BandVerdict { normal, abnormal };

// Direct transcription of the error-tolerance band:
//   score > threshold                        -> normal
//   virtual <= score < threshold             -> normal  (virtual = threshold - v)
//   score < virtual                          -> abnormal
// with the score == threshold boundary documented as normal.
inline BandVerdict tolerance_band(double score, double threshold, double v) {
  if (score > threshold) return BandVerdict::normal;
  if (score == threshold) return BandVerdict::normal;
  const double virtual_threshold = threshold - v;
  if (virtual_threshold <= score && score < threshold) return BandVerdict::normal;
  return BandVerdict::abnormal;
}

}  // namespace oracle
