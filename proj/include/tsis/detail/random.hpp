#pragma once

// Distribution helpers over std::mt19937_64. The standard distributions are
// implementation-defined, so seeded output would differ between standard
// libraries; these only depend on the engine's raw output.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <vector>

namespace tsis::detail {

using Rng = std::mt19937_64;

// Uniform in [0, n). n must be > 0.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = Rng::max() - (Rng::max() % n);
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

// Uniform in [0, 1).
inline double uniform_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Index drawn proportionally to `weights`; falls back to uniform when all
// weights are zero.
class WeightedPicker {
 public:
  explicit WeightedPicker(std::span<const double> weights) : cumulative_(weights.size()) {
    std::partial_sum(weights.begin(), weights.end(), cumulative_.begin());
  }

  std::size_t operator()(Rng& rng) const {
    if (cumulative_.empty()) return 0;
    const double total = cumulative_.back();
    if (!(total > 0.0)) return static_cast<std::size_t>(uniform_below(rng, cumulative_.size()));
    const double r = uniform_unit(rng) * total;
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), r);
    if (it == cumulative_.end()) --it;
    return static_cast<std::size_t>(it - cumulative_.begin());
  }

 private:
  std::vector<double> cumulative_;
};

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_below(rng, i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace tsis::detail
