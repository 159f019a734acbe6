#pragma once

#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "tsis/corpus.hpp"
#include "tsis/detail/random.hpp"
#include "tsis/error.hpp"

namespace tsis {

inline constexpr double kDefaultAmplifyFactor = 3.0;

// Returns the input unchanged followed by artificial PUIS, each the union of a
// frequency-weighted random pair of distinct inputs. A union is accepted only
// if it fits the cap and is new (not equal to an input or an earlier union).
// Stops after round(factor * |input|) acceptances or when the reject budget
// runs out. Artificial entries have frequency 0.
inline std::vector<PUIS> amplify(const std::vector<PUIS>& puis, std::size_t cap, double factor,
                                 std::uint64_t seed) {
  if (!(factor >= 0.0) || !std::isfinite(factor))
    throw InvalidParameter("amplification factor must be a finite value >= 0");
  for (const auto& p : puis)
    if (p.instructions.size() > cap) throw OversizedPUIS(p.instructions.size(), cap);

  std::vector<PUIS> out = puis;
  const auto target = static_cast<std::size_t>(std::llround(factor * static_cast<double>(puis.size())));
  if (target == 0 || puis.size() < 2) return out;

  std::set<InstructionSet> seen;
  for (const auto& p : puis) seen.insert(p.instructions);

  std::vector<double> weights(puis.size());
  for (std::size_t i = 0; i < puis.size(); ++i) weights[i] = static_cast<double>(puis[i].frequency);
  const detail::WeightedPicker pick(weights);
  detail::Rng rng(seed);

  const std::size_t max_rejects = std::max<std::size_t>(1000, 20 * target);
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  while (accepted < target && rejected < max_rejects) {
    const auto i = pick(rng);
    const auto j = pick(rng);
    if (i == j) {
      ++rejected;
      continue;
    }
    const auto& a = puis[i];
    const auto& b = puis[j];
    if (union_size(a.instructions, b.instructions) > cap) {
      ++rejected;
      continue;
    }
    auto merged = set_union(a.instructions, b.instructions);
    if (!seen.insert(merged).second) {
      ++rejected;
      continue;
    }
    out.push_back({std::move(merged), 0,
                   {a.signature.inputs | b.signature.inputs, a.signature.outputs | b.signature.outputs}});
    ++accepted;
  }
  return out;
}

}  // namespace tsis
