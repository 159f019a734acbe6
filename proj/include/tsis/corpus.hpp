#pragma once

// Program-unit records, their deduplicated instruction subsets (PUIS), and a
// seeded synthetic corpus generator.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tsis/catalog.hpp"
#include "tsis/detail/hash.hpp"
#include "tsis/detail/random.hpp"
#include "tsis/error.hpp"
#include "tsis/instruction_set.hpp"
#include "tsis/typesig.hpp"

namespace tsis {

struct PURecord {
  std::string pu_id;
  std::string origin;
  std::vector<std::string> instructions;  // may repeat
};

// Program-unit instruction subset.
struct PUIS {
  InstructionSet instructions;
  std::uint64_t frequency = 1;  // 0 marks an artificial (amplified) subset
  TypeSignature signature;

  bool artificial() const { return frequency == 0; }
};

enum class UnknownIdPolicy { Reject, Drop };

inline nlohmann::json record_to_json(const PURecord& r) {
  return {{"pu_id", r.pu_id}, {"origin", r.origin}, {"instructions", r.instructions}};
}

// One JSON object per line; blank lines are ignored.
inline std::vector<PURecord> parse_corpus(std::istream& in, const Catalog& cat,
                                          UnknownIdPolicy policy = UnknownIdPolicy::Reject) {
  std::vector<PURecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;

    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw CorpusParseError(lineno, e.what());
    }
    if (!doc.is_object()) throw CorpusParseError(lineno, "record is not a JSON object");
    for (const char* key : {"pu_id", "origin"})
      if (!doc.contains(key) || !doc[key].is_string())
        throw CorpusParseError(lineno, std::string("missing string field '") + key + "'");
    if (!doc.contains("instructions") || !doc["instructions"].is_array())
      throw CorpusParseError(lineno, "missing 'instructions' array");

    PURecord rec{doc["pu_id"].get<std::string>(), doc["origin"].get<std::string>(), {}};
    for (const auto& id : doc["instructions"]) {
      if (!id.is_string()) throw CorpusParseError(lineno, "instruction ids must be strings");
      const auto& text = id.get_ref<const std::string&>();
      if (!cat.contains(text)) {
        if (policy == UnknownIdPolicy::Reject) throw UnknownInstruction(text, lineno);
        continue;
      }
      rec.instructions.push_back(text);
    }
    if (rec.instructions.empty()) throw CorpusParseError(lineno, "record has no instructions");
    out.push_back(std::move(rec));
  }
  return out;
}

inline std::vector<PURecord> load_corpus(const std::string& path, const Catalog& cat,
                                         UnknownIdPolicy policy = UnknownIdPolicy::Reject) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open corpus file '" + path + "'");
  return parse_corpus(in, cat, policy);
}

inline void write_corpus(std::ostream& out, const std::vector<PURecord>& records) {
  for (const auto& r : records) out << record_to_json(r).dump() << '\n';
}

struct PuisTable {
  std::vector<PUIS> puis;     // sorted by instruction list
  std::size_t discarded = 0;  // records whose unique-instruction count exceeded the cap
};

inline PuisTable to_puis(const std::vector<PURecord>& records, const Catalog& cat, std::size_t cap) {
  if (cap == 0) throw InvalidParameter("cap must be positive");
  std::map<InstructionSet, std::uint64_t> counts;
  PuisTable table;
  for (const auto& r : records) {
    auto set = make_instruction_set(r.instructions);
    if (set.size() > cap) {
      ++table.discarded;
      continue;
    }
    ++counts[std::move(set)];
  }
  table.puis.reserve(counts.size());
  for (auto& [set, freq] : counts) {
    const auto sig = subset_signature(set, cat);
    table.puis.push_back({set, freq, sig});
  }
  return table;
}

// Stable fingerprint of a real PUIS population, recorded in atlases so that
// evaluation can refuse a corpus the atlas was not built from.
inline std::string puis_fingerprint(const std::vector<PUIS>& puis) {
  detail::Fnv1a h;
  for (const auto& p : puis) {
    if (p.artificial()) continue;
    for (const auto& id : p.instructions) {
      h.update(id);
      h.separator();
    }
    h.update("#" + std::to_string(p.frequency));
    h.update("\n");
  }
  return h.hex();
}

inline std::string catalog_fingerprint(const Catalog& cat) {
  detail::Fnv1a h;
  h.update(catalog_to_json(cat).dump());
  return h.hex();
}

struct SyntheticCorpusParams {
  std::uint64_t seed = 1;
  std::size_t n_pus = 5000;
  double zipf_exponent = 1.0;
  std::size_t n_groups = 32;
  std::size_t group_size_min = 6;
  std::size_t group_size_max = 14;
  std::size_t cap = 10;
};

// Instruction ids ordered by popularity rank (index 0 = rank 1) for the
// given seed. generate_synthetic_corpus uses exactly this ranking.
inline std::vector<std::string> synthetic_instruction_ranking(const Catalog& cat, std::uint64_t seed) {
  auto ids = cat.ids();
  detail::Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  detail::shuffle(ids, rng);
  return ids;
}

// Each program unit draws one co-occurrence group (Zipfian over groups), a
// unique-instruction count from a geometric law with P(count <= cap) = 0.9,
// then that many distinct group members weighted by their global Zipf rank.
// Each chosen instruction is emitted 1-3 times in shuffled order.
inline std::vector<PURecord> generate_synthetic_corpus(const SyntheticCorpusParams& p,
                                                       const Catalog& cat) {
  if (p.n_pus == 0) throw InvalidParameter("n_pus must be at least 1");
  if (!(p.zipf_exponent > 0.0) || !std::isfinite(p.zipf_exponent))
    throw InvalidParameter("zipf_exponent must be positive");
  if (p.n_groups == 0) throw InvalidParameter("need at least one co-occurrence group");
  if (p.group_size_min == 0 || p.group_size_min > p.group_size_max)
    throw InvalidParameter("group size range must satisfy 1 <= min <= max");
  if (p.cap == 0) throw InvalidParameter("cap must be positive");
  if (cat.size() == 0) throw InvalidParameter("catalog is empty");

  const auto ranking = synthetic_instruction_ranking(cat, p.seed);
  const std::size_t n_instr = ranking.size();
  std::vector<double> rank_weight(n_instr);
  for (std::size_t r = 0; r < n_instr; ++r)
    rank_weight[r] = 1.0 / std::pow(static_cast<double>(r + 1), p.zipf_exponent);

  detail::Rng rng(p.seed);

  // Draws `k` distinct ranks from `pool` proportionally to rank weight.
  auto draw_distinct = [&](std::vector<std::size_t> pool, std::size_t k) {
    std::vector<std::size_t> picked;
    while (picked.size() < k && !pool.empty()) {
      std::vector<double> w(pool.size());
      for (std::size_t i = 0; i < pool.size(); ++i) w[i] = rank_weight[pool[i]];
      const auto idx = detail::WeightedPicker(w)(rng);
      picked.push_back(pool[idx]);
      pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(idx));
    }
    return picked;
  };

  std::vector<std::size_t> all_ranks(n_instr);
  for (std::size_t r = 0; r < n_instr; ++r) all_ranks[r] = r;

  std::vector<std::vector<std::size_t>> groups(p.n_groups);
  for (auto& g : groups) {
    const auto lo = std::min(p.group_size_min, n_instr);
    const auto hi = std::min(p.group_size_max, n_instr);
    const auto size = lo + static_cast<std::size_t>(detail::uniform_below(rng, hi - lo + 1));
    g = draw_distinct(all_ranks, size);
    std::sort(g.begin(), g.end());
  }

  std::vector<double> group_weight(p.n_groups);
  for (std::size_t i = 0; i < p.n_groups; ++i)
    group_weight[i] = 1.0 / std::pow(static_cast<double>(i + 1), p.zipf_exponent);
  const detail::WeightedPicker pick_group(group_weight);

  const double success = 1.0 - std::pow(0.1, 1.0 / static_cast<double>(p.cap));

  std::vector<PURecord> out;
  out.reserve(p.n_pus);
  char idbuf[32];
  for (std::size_t i = 0; i < p.n_pus; ++i) {
    const auto& group = groups[pick_group(rng)];
    std::size_t k = 1;
    while (detail::uniform_unit(rng) >= success) ++k;
    k = std::min(k, group.size());

    std::vector<std::string> instrs;
    for (auto rank : draw_distinct(group, k)) {
      const auto repeats = 1 + detail::uniform_below(rng, 3);
      for (std::uint64_t r = 0; r < repeats; ++r) instrs.push_back(ranking[rank]);
    }
    detail::shuffle(instrs, rng);

    std::snprintf(idbuf, sizeof idbuf, "syn-%07zu", i);
    out.push_back({idbuf, "synthetic", std::move(instrs)});
  }
  return out;
}

struct CorpusStats {
  std::uint64_t total_pus = 0;  // frequency-weighted
  std::size_t unique_puis = 0;
  std::size_t cap = 10;
  std::map<std::size_t, std::uint64_t> size_histogram;  // unique-instruction count -> PUs
  double fraction_within_cap = 0.0;
  std::map<std::string, std::uint64_t> pus_per_signature;  // canonical signature -> PUs
};

// Artificial (frequency 0) entries contribute nothing.
inline CorpusStats corpus_stats(const std::vector<PUIS>& puis, std::size_t cap = 10) {
  CorpusStats st;
  st.cap = cap;
  std::uint64_t within = 0;
  for (const auto& p : puis) {
    if (p.artificial()) continue;
    ++st.unique_puis;
    st.total_pus += p.frequency;
    st.size_histogram[p.instructions.size()] += p.frequency;
    st.pus_per_signature[canonical_string(p.signature)] += p.frequency;
    if (p.instructions.size() <= cap) within += p.frequency;
  }
  if (st.total_pus > 0)
    st.fraction_within_cap = static_cast<double>(within) / static_cast<double>(st.total_pus);
  return st;
}

}  // namespace tsis
