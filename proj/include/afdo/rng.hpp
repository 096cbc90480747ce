#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace afdo {

// Deterministic seed derivation: child streams are keyed by a label so any
// sweep cell, record or replicate can be reproduced in isolation without
// replaying the parent stream.
std::uint64_t derive_seed(std::uint64_t parent, std::string_view label);

// mt19937_64 engine with hand-fixed output transforms. The engine sequence is
// pinned by the standard; std::uniform_* / std::normal_distribution are not,
// and the reproducibility checks compare output bytes across runs.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform_range(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Unbiased integer in [0, n) by rejection.
  std::uint64_t uniform_int(std::uint64_t n);

  // Box-Muller without the cached spare, so draw order is stateless.
  double normal(double mean, double sd);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_int(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace afdo
