#pragma once

// Instruction-subset families: clustering PUIS into capped subsets, the
// monolithic baseline family, per-signature (TSIS) families, coverage-based
// reordering and family selection for a query signature.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "tsis/amplify.hpp"
#include "tsis/catalog.hpp"
#include "tsis/corpus.hpp"
#include "tsis/detail/bits.hpp"
#include "tsis/detail/hash.hpp"
#include "tsis/detail/parallel.hpp"
#include "tsis/error.hpp"
#include "tsis/instruction_set.hpp"
#include "tsis/typesig.hpp"

namespace tsis {

inline constexpr std::size_t kDefaultCap = 10;
inline const std::string kBaselineKey = "baseline";

struct InstructionSubset {
  InstructionSet instructions;
  std::uint64_t coverage = 0;  // real PUs (frequency-weighted) whose PUIS is contained here
  std::uint64_t gain = 0;      // of those, the PUs not contained in any earlier subset of the family
  std::size_t emitted = 0;     // position in clustering output order

  friend bool operator==(const InstructionSubset&, const InstructionSubset&) = default;
};

struct Family {
  std::string key;  // "baseline" or a canonical signature
  std::size_t cap = kDefaultCap;
  std::vector<InstructionSubset> subsets;  // family order
  std::uint64_t population = 0;            // real PUs used to build the family

  std::size_t size() const { return subsets.size(); }
};

struct AtlasProvenance {
  std::string puis_hash;
  std::string catalog_hash;
  std::string catalog_name;
  std::string catalog_version;
  std::uint64_t seed = 0;
  double amplify_factor = kDefaultAmplifyFactor;
  std::string reorder = "marginal-coverage";  // TSIS reorder policy
  std::size_t discarded = 0;  // records dropped for exceeding the cap

  friend bool operator==(const AtlasProvenance&, const AtlasProvenance&) = default;
};

struct FamilyAtlas {
  std::size_t cap = kDefaultCap;
  AtlasProvenance provenance;
  Family baseline;
  std::map<std::string, Family> by_signature;
};

// Greedy agglomeration. Unique PUIS are visited by descending frequency
// (ties: ascending id list); one that is not yet covered is merged into the
// subset sharing the most instructions whose union still fits the cap
// (ties: earliest subset), or else starts a new subset. A final pass merges
// any pair of subsets whose union fits, until no pair does.
inline std::vector<InstructionSubset> cluster(const std::vector<PUIS>& puis, std::size_t cap) {
  if (cap == 0) throw InvalidParameter("cap must be positive");
  std::map<InstructionSet, std::uint64_t> unique;
  for (const auto& p : puis) {
    if (p.instructions.size() > cap) throw OversizedPUIS(p.instructions.size(), cap);
    if (p.instructions.empty()) continue;
    unique[p.instructions] += p.frequency;
  }

  std::vector<std::pair<InstructionSet, std::uint64_t>> order(unique.begin(), unique.end());
  std::stable_sort(order.begin(), order.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });

  std::vector<InstructionSet> sets;
  sets.reserve(order.size());
  for (const auto& [s, f] : order) sets.push_back(s);
  const detail::IdUniverse universe(sets);

  std::vector<detail::Bits> subsets;
  std::vector<std::size_t> sizes;
  for (const auto& set : sets) {
    const auto bits = universe.encode(set);
    bool covered = false;
    std::size_t best = subsets.size();
    std::size_t best_overlap = 0;
    for (std::size_t i = 0; i < subsets.size(); ++i) {
      const auto overlap = detail::bits_intersection_count(bits, subsets[i]);
      if (overlap == set.size()) {
        covered = true;
        break;
      }
      if (sizes[i] + set.size() - overlap > cap) continue;
      if (best == subsets.size() || overlap > best_overlap) {
        best = i;
        best_overlap = overlap;
      }
    }
    if (covered) continue;
    if (best == subsets.size()) {
      subsets.push_back(bits);
      sizes.push_back(set.size());
    } else {
      detail::bits_or_assign(subsets[best], bits);
      sizes[best] = detail::bits_count(subsets[best]);
    }
  }

  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < subsets.size(); ++i) {
      for (std::size_t j = i + 1; j < subsets.size();) {
        if (detail::bits_union_count(subsets[i], subsets[j]) <= cap) {
          detail::bits_or_assign(subsets[i], subsets[j]);
          subsets.erase(subsets.begin() + static_cast<std::ptrdiff_t>(j));
          changed = true;
        } else {
          ++j;
        }
      }
    }
  }

  std::vector<InstructionSubset> out;
  out.reserve(subsets.size());
  for (std::size_t i = 0; i < subsets.size(); ++i) out.push_back({universe.decode(subsets[i]), 0, 0, i});
  return out;
}

namespace detail {

// For each subset, the indices of the real PUIS in `building` it contains.
inline std::vector<std::vector<std::size_t>> containment(const std::vector<InstructionSubset>& subsets,
                                                        const std::vector<PUIS>& building) {
  std::vector<InstructionSet> sets;
  for (const auto& s : subsets) sets.push_back(s.instructions);
  for (const auto& p : building) sets.push_back(p.instructions);
  const IdUniverse universe(sets);

  std::vector<std::pair<Bits, std::size_t>> real;
  for (std::size_t i = 0; i < building.size(); ++i)
    if (!building[i].artificial()) real.emplace_back(universe.encode(building[i].instructions), i);

  std::vector<std::vector<std::size_t>> out(subsets.size());
  for (std::size_t s = 0; s < subsets.size(); ++s) {
    const auto bits = universe.encode(subsets[s].instructions);
    for (const auto& [pb, idx] : real)
      if (bits_subset(pb, bits)) out[s].push_back(idx);
  }
  return out;
}

}  // namespace detail

// Sets `coverage` and `gain` of every subset for the family's current order,
// counting only real (frequency > 0) PUIS of `building`.
inline void compute_coverage(std::vector<InstructionSubset>& subsets, const std::vector<PUIS>& building) {
  const auto contains = detail::containment(subsets, building);
  std::vector<char> claimed(building.size(), 0);
  for (std::size_t s = 0; s < subsets.size(); ++s) {
    subsets[s].coverage = 0;
    subsets[s].gain = 0;
    for (auto idx : contains[s]) {
      subsets[s].coverage += building[idx].frequency;
      if (!claimed[idx]) {
        claimed[idx] = 1;
        subsets[s].gain += building[idx].frequency;
      }
    }
  }
}

enum class ReorderPolicy {
  // Repeatedly take the subset containing the most program units not yet
  // contained by an earlier pick (greedy min-sum set cover). On families
  // where every PUIS fits exactly one subset this is the same order as
  // TotalCoverage.
  MarginalCoverage,
  // Plain descending coverage.
  TotalCoverage,
};

inline const char* policy_name(ReorderPolicy p) {
  return p == ReorderPolicy::MarginalCoverage ? "marginal-coverage" : "total-coverage";
}

inline ReorderPolicy parse_reorder_policy(std::string_view text) {
  if (text == "marginal-coverage" || text == "marginal") return ReorderPolicy::MarginalCoverage;
  if (text == "total-coverage" || text == "total") return ReorderPolicy::TotalCoverage;
  throw InvalidParameter("unknown reorder policy '" + std::string(text) + "'");
}

// Orders subsets by descending PU frequency under `policy`; ties go to the
// ascending instruction-id list. Afterwards `gain` is non-increasing along
// the family (and so is `coverage` under TotalCoverage).
inline Family reorder(Family family, const std::vector<PUIS>& building,
                      ReorderPolicy policy = ReorderPolicy::MarginalCoverage) {
  auto& subs = family.subsets;
  auto key_before = [](std::uint64_t wa, const InstructionSubset& a, std::uint64_t wb, const InstructionSubset& b) {
    if (wa != wb) return wa > wb;
    return a.instructions < b.instructions;
  };

  if (policy == ReorderPolicy::TotalCoverage) {
    compute_coverage(subs, building);
    std::stable_sort(subs.begin(), subs.end(), [&](const InstructionSubset& a, const InstructionSubset& b) {
      return key_before(a.coverage, a, b.coverage, b);
    });
    compute_coverage(subs, building);
    return family;
  }

  // Lazy greedy: marginal gains only shrink as more PUs are claimed, so a
  // stale heap key is an upper bound and a refreshed top that still beats
  // the next key is the true maximum.
  const auto contains = detail::containment(subs, building);
  std::vector<char> claimed(building.size(), 0);
  auto marginal = [&](std::size_t s) {
    std::uint64_t w = 0;
    for (auto idx : contains[s])
      if (!claimed[idx]) w += building[idx].frequency;
    return w;
  };

  struct Candidate {
    std::uint64_t weight;
    std::size_t index;
  };
  auto worse = [&](const Candidate& a, const Candidate& b) {
    return key_before(b.weight, subs[b.index], a.weight, subs[a.index]);
  };
  std::vector<Candidate> heap;
  for (std::size_t s = 0; s < subs.size(); ++s) heap.push_back({marginal(s), s});
  std::make_heap(heap.begin(), heap.end(), worse);

  std::vector<std::size_t> order;
  order.reserve(subs.size());
  while (!heap.empty()) {
    std::pop_heap(heap.begin(), heap.end(), worse);
    Candidate top = heap.back();
    heap.pop_back();
    top.weight = marginal(top.index);
    if (!heap.empty() && worse(top, heap.front())) {
      heap.push_back(top);
      std::push_heap(heap.begin(), heap.end(), worse);
      continue;
    }
    order.push_back(top.index);
    for (auto idx : contains[top.index]) claimed[idx] = 1;
  }

  std::vector<InstructionSubset> sorted;
  sorted.reserve(subs.size());
  for (auto i : order) sorted.push_back(std::move(subs[i]));
  subs = std::move(sorted);
  compute_coverage(subs, building);
  return family;
}

// The same family in clustering output order (the "before reordering" view).
inline Family emission_ordered(Family family) {
  std::stable_sort(family.subsets.begin(), family.subsets.end(),
                   [](const InstructionSubset& a, const InstructionSubset& b) { return a.emitted < b.emitted; });
  return family;
}

namespace detail {

inline std::uint64_t group_seed(std::uint64_t seed, const std::string& key) {
  Fnv1a h;
  h.update(key);
  return seed ^ h.value();
}

inline std::uint64_t population_of(const std::vector<PUIS>& puis) {
  std::uint64_t n = 0;
  for (const auto& p : puis) n += p.frequency;
  return n;
}

}  // namespace detail

struct AtlasOptions {
  std::size_t cap = kDefaultCap;
  double amplify_factor = kDefaultAmplifyFactor;
  std::uint64_t seed = 1;
  ReorderPolicy reorder = ReorderPolicy::MarginalCoverage;
  unsigned threads = 1;
};

// Baseline from every real PUIS (amplified as one pool, kept in clustering
// order). One TSIS family per production signature that has at least one
// real PU, built only from that signature's PUIS (amplified per group) and
// reordered by coverage. Empty-sided signatures feed the baseline only.
inline FamilyAtlas build_atlas(const std::vector<PUIS>& input, const Catalog& cat, const AtlasOptions& opt) {
  if (opt.cap == 0) throw InvalidParameter("cap must be positive");

  std::vector<PUIS> real;
  for (const auto& p : input) {
    if (p.artificial()) continue;
    if (p.instructions.size() > opt.cap) throw OversizedPUIS(p.instructions.size(), opt.cap);
    PUIS q = p;
    q.signature = subset_signature(q.instructions, cat);
    real.push_back(std::move(q));
  }

  FamilyAtlas atlas;
  atlas.cap = opt.cap;
  atlas.provenance.puis_hash = puis_fingerprint(real);
  atlas.provenance.catalog_hash = catalog_fingerprint(cat);
  atlas.provenance.catalog_name = cat.name();
  atlas.provenance.catalog_version = cat.version();
  atlas.provenance.seed = opt.seed;
  atlas.provenance.amplify_factor = opt.amplify_factor;
  atlas.provenance.reorder = policy_name(opt.reorder);

  std::map<std::string, std::vector<PUIS>> groups;
  for (const auto& p : real)
    if (p.signature.is_production()) groups[canonical_string(p.signature)].push_back(p);
  std::vector<std::string> keys;
  for (const auto& [k, v] : groups) keys.push_back(k);

  // Slot 0 is the baseline, slot i+1 the family for keys[i].
  std::vector<Family> built(keys.size() + 1);
  detail::parallel_for(built.size(), opt.threads, [&](std::size_t slot) {
    Family fam;
    fam.cap = opt.cap;
    if (slot == 0) {
      fam.key = kBaselineKey;
      fam.subsets = cluster(amplify(real, opt.cap, opt.amplify_factor, opt.seed), opt.cap);
      compute_coverage(fam.subsets, real);
      fam.population = detail::population_of(real);
    } else {
      const auto& key = keys[slot - 1];
      const auto& group = groups.at(key);
      fam.key = key;
      fam.subsets = cluster(amplify(group, opt.cap, opt.amplify_factor, detail::group_seed(opt.seed, key)), opt.cap);
      fam.population = detail::population_of(group);
      fam = reorder(std::move(fam), group, opt.reorder);
    }
    built[slot] = std::move(fam);
  });

  atlas.baseline = std::move(built[0]);
  for (std::size_t i = 0; i < keys.size(); ++i) atlas.by_signature.emplace(keys[i], std::move(built[i + 1]));
  return atlas;
}

// Exact-match TSIS family, else the baseline.
inline const Family& select_family(const FamilyAtlas& atlas, const TypeSignature& query) {
  if (!query.is_production()) return atlas.baseline;
  auto it = atlas.by_signature.find(canonical_string(query));
  return it == atlas.by_signature.end() ? atlas.baseline : it->second;
}

struct FamilyStatsRow {
  std::string key;
  std::size_t subset_count = 0;
  std::uint64_t population = 0;
};

// Baseline first, then signature families in canonical-string order.
inline std::vector<FamilyStatsRow> atlas_stats(const FamilyAtlas& atlas) {
  std::vector<FamilyStatsRow> rows;
  rows.push_back({atlas.baseline.key, atlas.baseline.size(), atlas.baseline.population});
  for (const auto& [key, fam] : atlas.by_signature) rows.push_back({key, fam.size(), fam.population});
  return rows;
}

// --- serialization ---------------------------------------------------------

namespace detail {

inline nlohmann::json family_to_json(const Family& fam) {
  auto subsets = nlohmann::json::array();
  for (const auto& s : fam.subsets)
    subsets.push_back(
        {{"instructions", s.instructions}, {"coverage", s.coverage}, {"gain", s.gain}, {"emitted", s.emitted}});
  return {{"subsets", std::move(subsets)}, {"population", fam.population}};
}

inline Family family_from_json(const nlohmann::json& j, const std::string& key, std::size_t cap) {
  Family fam;
  fam.key = key;
  fam.cap = cap;
  fam.population = j.at("population").get<std::uint64_t>();
  std::size_t index = 0;
  for (const auto& s : j.at("subsets")) {
    InstructionSubset sub;
    sub.instructions = make_instruction_set(s.at("instructions").get<std::vector<std::string>>());
    sub.coverage = s.at("coverage").get<std::uint64_t>();
    sub.gain = s.value("gain", std::uint64_t{0});
    sub.emitted = s.contains("emitted") ? s["emitted"].get<std::size_t>() : index;
    if (sub.instructions.empty() || sub.instructions.size() > cap)
      throw AtlasParseError("family '" + key + "' has a subset of invalid size");
    fam.subsets.push_back(std::move(sub));
    ++index;
  }
  return fam;
}

}  // namespace detail

inline nlohmann::json provenance_to_json(const AtlasProvenance& p) {
  return {{"puis_hash", p.puis_hash},
          {"catalog_hash", p.catalog_hash},
          {"catalog_name", p.catalog_name},
          {"catalog_version", p.catalog_version},
          {"seed", p.seed},
          {"amplify_factor", p.amplify_factor},
          {"reorder", p.reorder},
          {"discarded", p.discarded}};
}

inline AtlasProvenance provenance_from_json(const nlohmann::json& j) {
  AtlasProvenance p;
  p.puis_hash = j.at("puis_hash").get<std::string>();
  p.catalog_hash = j.at("catalog_hash").get<std::string>();
  p.catalog_name = j.value("catalog_name", "");
  p.catalog_version = j.value("catalog_version", "");
  p.seed = j.value("seed", std::uint64_t{0});
  p.amplify_factor = j.value("amplify_factor", kDefaultAmplifyFactor);
  p.reorder = j.value("reorder", std::string("marginal-coverage"));
  p.discarded = j.value("discarded", std::size_t{0});
  return p;
}

inline nlohmann::json atlas_to_json(const FamilyAtlas& atlas) {
  auto families = nlohmann::json::object();
  for (const auto& [key, fam] : atlas.by_signature) families[key] = detail::family_to_json(fam);
  return {{"cap", atlas.cap},
          {"provenance", provenance_to_json(atlas.provenance)},
          {"baseline", detail::family_to_json(atlas.baseline)},
          {"families", std::move(families)}};
}

inline FamilyAtlas atlas_from_json(const nlohmann::json& j) {
  FamilyAtlas atlas;
  try {
    atlas.cap = j.at("cap").get<std::size_t>();
    atlas.provenance = provenance_from_json(j.at("provenance"));
    atlas.baseline = detail::family_from_json(j.at("baseline"), kBaselineKey, atlas.cap);
    for (const auto& [key, fam] : j.at("families").items()) {
      const auto sig = parse_signature(key);
      if (!sig.is_production() || canonical_string(sig) != key)
        throw AtlasParseError("atlas family key '" + key + "' is not a canonical production signature");
      atlas.by_signature.emplace(key, detail::family_from_json(fam, key, atlas.cap));
    }
  } catch (const nlohmann::json::exception& e) {
    throw AtlasParseError(std::string("malformed atlas: ") + e.what());
  } catch (const MalformedSignature& e) {
    throw AtlasParseError(e.what());
  }
  return atlas;
}

inline void save_atlas(const FamilyAtlas& atlas, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write atlas '" + path + "'");
  out << atlas_to_json(atlas).dump(1) << '\n';
  if (!out) throw IoError("write failed for atlas '" + path + "'");
}

inline FamilyAtlas load_atlas(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open atlas '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw AtlasParseError("atlas '" + path + "': " + e.what());
  }
  return atlas_from_json(j);
}

}  // namespace tsis
