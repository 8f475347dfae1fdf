#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace evauth {

// Stafford/Steele splitmix64 step; used to derive independent sub-stream
// seeds so adding one event kind never perturbs another kind's stream.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t stream_tag) {
  return splitmix64(seed ^ splitmix64(stream_tag));
}

// mt19937_64 with hand-rolled variate transforms. The standard specifies the
// engine but not the distributions, so distributions are implemented here to
// keep generated logs identical across platforms and library versions.
class SeededRng {
public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double exponential(double mean) {
    return -mean * std::log1p(-uniform01());
  }

  // Uniform integer in [0, n); n must be positive.
  std::uint64_t uniform_int(std::uint64_t n) {
    auto v = static_cast<std::uint64_t>(uniform01() * static_cast<double>(n));
    return v >= n ? n - 1 : v;
  }

  // Index into `weights` drawn proportionally to the weights.
  std::size_t weighted_index(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double u = uniform01() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      acc += weights[i];
      if (u < acc) return i;
    }
    return weights.size() - 1;
  }

private:
  std::mt19937_64 engine_;
};

}  // namespace evauth
