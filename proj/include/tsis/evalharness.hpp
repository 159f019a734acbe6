#pragma once

// Relative non-productive effort: how many leading subsets of a family are
// examined before the first one that contains a target PUIS.
//
// Per PUIS:      R1 (baseline), R2 (own TSIS family, clustering order),
//                R3 (own TSIS family, reordered).
// Per signature: T_i = sum of frequency-weighted R_i, M_i = T_i / n_pus.

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tsis/corpus.hpp"
#include "tsis/detail/bits.hpp"
#include "tsis/detail/parallel.hpp"
#include "tsis/error.hpp"
#include "tsis/families.hpp"
#include "tsis/instruction_set.hpp"
#include "tsis/typesig.hpp"

namespace tsis {

inline std::string describe(const InstructionSet& set) {
  std::string out = "{";
  for (std::size_t i = 0; i < set.size(); ++i) out += (i ? "," : "") + set[i];
  return out + "}";
}

// Index of the first subset containing `puis`.
inline std::size_t leading_nonsuperset_count(const Family& family, const InstructionSet& puis) {
  for (std::size_t i = 0; i < family.subsets.size(); ++i)
    if (is_subset_of(puis, family.subsets[i].instructions)) return i;
  throw NoCoveringSubset("no subset of family '" + family.key + "' contains " + describe(puis));
}

struct SignatureEvaluation {
  std::string signature;
  std::uint64_t n_pus = 0;
  std::uint64_t T1 = 0, T2 = 0, T3 = 0;

  double M1() const { return mean(T1); }
  double M2() const { return mean(T2); }
  double M3() const { return mean(T3); }

 private:
  double mean(std::uint64_t t) const {
    return n_pus == 0 ? 0.0 : static_cast<double>(t) / static_cast<double>(n_pus);
  }
};

namespace detail {

// Family pre-encoded for repeated containment queries.
class EncodedFamily {
 public:
  EncodedFamily(const Family& fam, const IdUniverse& universe) : family_(&fam) {
    bits_.reserve(fam.subsets.size());
    for (const auto& s : fam.subsets) bits_.push_back(universe.encode(s.instructions));
  }

  std::size_t leading(const Bits& target, const InstructionSet& target_ids) const {
    for (std::size_t i = 0; i < bits_.size(); ++i)
      if (bits_subset(target, bits_[i])) return i;
    throw NoCoveringSubset("no subset of family '" + family_->key + "' contains " + describe(target_ids));
  }

 private:
  const Family* family_;
  std::vector<Bits> bits_;
};

template <typename Families>
IdUniverse universe_for(const std::vector<PUIS>& group, const Families& families) {
  std::vector<InstructionSet> sets;
  for (const auto& p : group) sets.push_back(p.instructions);
  for (const Family* f : families)
    for (const auto& s : f->subsets) sets.push_back(s.instructions);
  return IdUniverse(sets);
}

}  // namespace detail

// `group` holds the PUIS of one signature; artificial entries are ignored.
inline SignatureEvaluation evaluate_signature(const std::string& signature, const std::vector<PUIS>& group,
                                              const Family& baseline, const Family& tsis_unordered,
                                              const Family& tsis_reordered) {
  const std::vector<const Family*> fams{&baseline, &tsis_unordered, &tsis_reordered};
  const auto universe = detail::universe_for(group, fams);
  const detail::EncodedFamily b(baseline, universe), u(tsis_unordered, universe), r(tsis_reordered, universe);

  SignatureEvaluation ev;
  ev.signature = signature;
  for (const auto& p : group) {
    if (p.artificial()) continue;
    const auto bits = universe.encode(p.instructions);
    ev.n_pus += p.frequency;
    ev.T1 += p.frequency * b.leading(bits, p.instructions);
    ev.T2 += p.frequency * u.leading(bits, p.instructions);
    ev.T3 += p.frequency * r.leading(bits, p.instructions);
  }
  return ev;
}

// log10 of a work ratio. nullopt when the numerator is zero ("n/a"); +inf when
// only the denominator is zero.
inline std::optional<double> log10_ratio(std::uint64_t num, std::uint64_t den) {
  if (num == 0) return std::nullopt;
  if (den == 0) return std::numeric_limits<double>::infinity();
  return std::log10(static_cast<double>(num) / static_cast<double>(den));
}

struct EvaluationAggregates {
  std::uint64_t total_pus = 0;
  std::uint64_t sum_T1 = 0, sum_T2 = 0, sum_T3 = 0;
  std::optional<double> reduction_T1_T2;  // log10(sum_T1 / sum_T2)
  std::optional<double> reduction_T1_T3;  // log10(sum_T1 / sum_T3)
};

struct EvaluationReport {
  std::vector<SignatureEvaluation> rows;  // descending M1
  EvaluationAggregates aggregates;
  AtlasProvenance provenance;
};

// Strictly by descending M1 (exact rational comparison), ties by signature.
inline bool m1_descending(const SignatureEvaluation& a, const SignatureEvaluation& b) {
  const auto lhs = static_cast<unsigned __int128>(a.T1) * b.n_pus;
  const auto rhs = static_cast<unsigned __int128>(b.T1) * a.n_pus;
  if (lhs != rhs) return lhs > rhs;
  return a.signature < b.signature;
}

// `puis` must be the population the atlas was built from (checked through the
// provenance fingerprint). One row per atlas signature family.
inline EvaluationReport run_evaluation(const FamilyAtlas& atlas, const std::vector<PUIS>& puis,
                                       unsigned threads = 1) {
  if (puis_fingerprint(puis) != atlas.provenance.puis_hash)
    throw ProvenanceMismatch("corpus does not match the atlas provenance (PUIS fingerprint " +
                             puis_fingerprint(puis) + " vs " + atlas.provenance.puis_hash + ")");

  std::map<std::string, std::vector<PUIS>> groups;
  for (const auto& p : puis)
    if (!p.artificial() && p.signature.is_production()) groups[canonical_string(p.signature)].push_back(p);

  std::vector<const std::pair<const std::string, Family>*> entries;
  for (const auto& e : atlas.by_signature) entries.push_back(&e);

  std::vector<SignatureEvaluation> rows(entries.size());
  detail::parallel_for(entries.size(), threads, [&](std::size_t i) {
    const auto& [key, fam] = *entries[i];
    auto it = groups.find(key);
    if (it == groups.end())
      throw ProvenanceMismatch("atlas family '" + key + "' has no matching program units");
    rows[i] = evaluate_signature(key, it->second, atlas.baseline, emission_ordered(fam), fam);
  });

  EvaluationReport report;
  report.provenance = atlas.provenance;
  for (const auto& r : rows) {
    report.aggregates.total_pus += r.n_pus;
    report.aggregates.sum_T1 += r.T1;
    report.aggregates.sum_T2 += r.T2;
    report.aggregates.sum_T3 += r.T3;
  }
  report.aggregates.reduction_T1_T2 = log10_ratio(report.aggregates.sum_T1, report.aggregates.sum_T2);
  report.aggregates.reduction_T1_T3 = log10_ratio(report.aggregates.sum_T1, report.aggregates.sum_T3);
  std::sort(rows.begin(), rows.end(), m1_descending);
  report.rows = std::move(rows);
  return report;
}

}  // namespace tsis
