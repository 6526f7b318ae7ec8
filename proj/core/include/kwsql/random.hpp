#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "kwsql/error.hpp"

namespace kwsql {

// SplitMix64. Chosen over the std engines because its sequence is pinned by
// these few lines, so tests can re-derive draws independently.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 bits of precision.
  double next_double() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n).
  std::uint64_t next_below(std::uint64_t n) { return next() % n; }

private:
  std::uint64_t state_;
};

// Stream seed for attempt #index of a seeded generation run.
inline std::uint64_t attempt_seed(std::uint64_t seed, std::uint64_t index) {
  Rng mix(seed ^ (0x9E3779B97F4A7C15ULL * (index + 1)));
  return mix.next();
}

// Cumulative-scan weighted draw; consumes exactly one next_double().
// Weights must be non-negative with a positive sum.
inline std::size_t weighted_index(Rng& rng, std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw Error("validation", "negative selection weight");
    total += w;
  }
  if (total <= 0.0) throw Error("validation", "all selection weights are zero");
  double u = rng.next_double() * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (u < acc && weights[i] > 0.0) return i;
  }
  // Rounding fell past the end; return the last positive-weight slot.
  for (std::size_t i = weights.size(); i-- > 0;)
    if (weights[i] > 0.0) return i;
  throw Error("validation", "weighted draw failed");
}

} // namespace kwsql
