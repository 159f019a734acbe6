#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tsis/tsis.hpp"

namespace tsis::testing {

using detail::Rng;
using detail::uniform_below;
using detail::uniform_unit;

// Two-type toy catalog used by the worked examples.
inline Catalog small_catalog() {
  using T = DataType;
  return Catalog("small", "1",
                 {{"add", {T::Number}, {T::Number}},
                  {"concat", {T::String}, {T::String}},
                  {"length", {T::String}, {T::Number}},
                  {"lit", {}, {T::Number}}});
}

inline PUIS puis(std::vector<std::string> ids, std::uint64_t freq = 1) {
  return {make_instruction_set(std::move(ids)), freq, {}};
}

inline InstructionSubset subset(std::vector<std::string> ids) { return {make_instruction_set(std::move(ids))}; }

inline Family family(std::vector<std::vector<std::string>> subsets, std::string key = "n-n") {
  Family f;
  f.key = std::move(key);
  for (std::size_t i = 0; i < subsets.size(); ++i) {
    f.subsets.push_back(subset(std::move(subsets[i])));
    f.subsets.back().emitted = i;
  }
  return f;
}

// Random id set over "i0".."i{universe-1}" with each id kept with probability p.
inline InstructionSet random_ids(Rng& rng, std::size_t universe, double p, std::size_t min_size = 1) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < universe; ++i)
    if (uniform_unit(rng) < p) ids.push_back("i" + std::to_string(i));
  while (ids.size() < min_size) ids.push_back("i" + std::to_string(uniform_below(rng, universe)));
  return make_instruction_set(std::move(ids));
}

// Random PUIS population, deduplicated, every set no larger than `cap`.
inline std::vector<PUIS> random_population(Rng& rng, std::size_t n, std::size_t universe, std::size_t cap) {
  std::map<InstructionSet, std::uint64_t> merged;
  for (std::size_t i = 0; i < n; ++i) {
    auto ids = random_ids(rng, universe, 0.2);
    while (ids.size() > cap) ids.pop_back();
    merged[ids] += 1 + uniform_below(rng, 5);
  }
  std::vector<PUIS> out;
  for (auto& [ids, f] : merged) out.push_back({ids, f, {}});
  return out;
}

// Synthetic corpus reduced to PUIS under the bundled catalog.
inline PuisTable synthetic_table(std::uint64_t seed, std::size_t n_pus, std::size_t cap = 10) {
  SyntheticCorpusParams p;
  p.seed = seed;
  p.n_pus = n_pus;
  const auto cat = default_catalog();
  return to_puis(generate_synthetic_corpus(p, cat), cat, cap);
}

}  // namespace tsis::testing
