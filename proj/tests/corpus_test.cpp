#include <gtest/gtest.h>

#include <sstream>

#include "support.hpp"

namespace tsis {
namespace {

std::vector<PURecord> parse(const std::string& text, const Catalog& cat,
                            UnknownIdPolicy policy = UnknownIdPolicy::Reject) {
  std::istringstream in(text);
  return parse_corpus(in, cat, policy);
}

PURecord rec(std::vector<std::string> ids) { return {"pu", "test", std::move(ids)}; }

TEST(LoadCorpus, ThreeLines) {
  const auto cat = testing::small_catalog();
  const auto recs = parse(
      "{\"pu_id\":\"1\",\"origin\":\"f.py:a\",\"instructions\":[\"add\",\"add\"]}\n"
      "{\"pu_id\":\"2\",\"origin\":\"f.py:b\",\"instructions\":[\"concat\"]}\n"
      "\n"
      "{\"pu_id\":\"3\",\"origin\":\"f.py:c\",\"instructions\":[\"length\",\"concat\"]}\n",
      cat);
  ASSERT_EQ(recs.size(), 3u);
  EXPECT_EQ(recs[0].instructions, (std::vector<std::string>{"add", "add"}));
  EXPECT_EQ(recs[2].origin, "f.py:c");
}

TEST(LoadCorpus, EmptyInstructions) {
  const auto cat = testing::small_catalog();
  try {
    parse("{\"pu_id\":\"1\",\"origin\":\"x\",\"instructions\":[\"add\"]}\n"
          "{\"pu_id\":\"2\",\"origin\":\"x\",\"instructions\":[]}\n",
          cat);
    FAIL();
  } catch (const CorpusParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(LoadCorpus, UnknownIdRejectedWithLine) {
  const auto cat = testing::small_catalog();
  try {
    parse("{\"pu_id\":\"1\",\"origin\":\"x\",\"instructions\":[\"add\",\"frob\"]}\n", cat);
    FAIL();
  } catch (const UnknownInstruction& e) {
    EXPECT_EQ(e.id(), "frob");
    EXPECT_EQ(e.line(), 1u);
  }
}

TEST(LoadCorpus, UnknownIdDroppedOnRequest) {
  const auto cat = testing::small_catalog();
  const auto recs = parse("{\"pu_id\":\"1\",\"origin\":\"x\",\"instructions\":[\"add\",\"frob\"]}\n", cat,
                          UnknownIdPolicy::Drop);
  ASSERT_EQ(recs.size(), 1u);
  EXPECT_EQ(recs[0].instructions, std::vector<std::string>{"add"});
}

TEST(LoadCorpus, MalformedLines) {
  const auto cat = testing::small_catalog();
  EXPECT_THROW(parse("not json\n", cat), CorpusParseError);
  EXPECT_THROW(parse("[1,2]\n", cat), CorpusParseError);
  EXPECT_THROW(parse("{\"origin\":\"x\",\"instructions\":[\"add\"]}\n", cat), CorpusParseError);
  EXPECT_THROW(parse("{\"pu_id\":\"1\",\"origin\":\"x\",\"instructions\":[3]}\n", cat), CorpusParseError);
}

TEST(LoadCorpus, WriteThenParseRoundTrip) {
  const auto cat = default_catalog();
  SyntheticCorpusParams p;
  p.n_pus = 200;
  const auto recs = generate_synthetic_corpus(p, cat);
  std::ostringstream out;
  write_corpus(out, recs);
  const auto back = parse(out.str(), cat);
  ASSERT_EQ(back.size(), recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    EXPECT_EQ(back[i].pu_id, recs[i].pu_id);
    EXPECT_EQ(back[i].instructions, recs[i].instructions);
  }
}

TEST(ToPuis, DedupAndMerge) {
  const auto cat = testing::small_catalog();
  const auto t = to_puis({rec({"add", "length", "add"}), rec({"length", "add"})}, cat, 10);
  ASSERT_EQ(t.puis.size(), 1u);
  EXPECT_EQ(t.puis[0].instructions, (InstructionSet{"add", "length"}));
  EXPECT_EQ(t.puis[0].frequency, 2u);
  EXPECT_EQ(t.discarded, 0u);
}

TEST(ToPuis, OversizedDiscarded) {
  std::vector<InstructionSpec> specs;
  std::vector<std::string> ids;
  for (int i = 0; i < 11; ++i) {
    ids.push_back("op" + std::to_string(i));
    specs.push_back({ids.back(), {DataType::Number}, {DataType::Number}});
  }
  const Catalog cat("wide", "1", specs);
  const auto t = to_puis({rec(ids), rec({"op1"})}, cat, 10);
  EXPECT_EQ(t.discarded, 1u);
  ASSERT_EQ(t.puis.size(), 1u);
  EXPECT_EQ(t.puis[0].instructions, InstructionSet{"op1"});
}

TEST(ToPuis, DistinctSetsKeptApart) {
  const auto cat = testing::small_catalog();
  const auto t = to_puis({rec({"add"}), rec({"concat"})}, cat, 10);
  ASSERT_EQ(t.puis.size(), 2u);
  EXPECT_EQ(t.puis[0].frequency, 1u);
  EXPECT_EQ(t.puis[1].frequency, 1u);
  EXPECT_EQ(canonical_string(t.puis[0].signature), "n-n");
  EXPECT_EQ(canonical_string(t.puis[1].signature), "s-s");
}

TEST(GenerateCorpus, Deterministic) {
  const auto cat = default_catalog();
  SyntheticCorpusParams p;
  p.seed = 1;
  p.n_pus = 100;
  std::ostringstream a, b;
  write_corpus(a, generate_synthetic_corpus(p, cat));
  write_corpus(b, generate_synthetic_corpus(p, cat));
  EXPECT_EQ(a.str(), b.str());
  p.seed = 2;
  std::ostringstream c;
  write_corpus(c, generate_synthetic_corpus(p, cat));
  EXPECT_NE(a.str(), c.str());
}

TEST(GenerateCorpus, RankOneBeatsRankTwelve) {
  const auto cat = default_catalog();
  SyntheticCorpusParams p;
  p.seed = 5;
  p.n_pus = 10000;
  const auto ranking = synthetic_instruction_ranking(cat, p.seed);
  std::map<std::string, std::size_t> pus_using;
  for (const auto& r : generate_synthetic_corpus(p, cat))
    for (const auto& id : make_instruction_set(r.instructions)) ++pus_using[id];
  EXPECT_GT(pus_using[ranking[0]], pus_using[ranking[11]]);
}

TEST(GenerateCorpus, InvalidParameters) {
  const auto cat = default_catalog();
  SyntheticCorpusParams p;
  p.n_pus = 0;
  EXPECT_THROW(generate_synthetic_corpus(p, cat), InvalidParameter);
  p = {};
  p.zipf_exponent = 0;
  EXPECT_THROW(generate_synthetic_corpus(p, cat), InvalidParameter);
  p = {};
  p.group_size_min = 9;
  p.group_size_max = 3;
  EXPECT_THROW(generate_synthetic_corpus(p, cat), InvalidParameter);
  p = {};
  p.n_groups = 0;
  EXPECT_THROW(generate_synthetic_corpus(p, cat), InvalidParameter);
}

TEST(CorpusStats, SmallPopulation) {
  const auto cat = testing::small_catalog();
  auto t = to_puis({rec({"add", "lit"}), rec({"lit", "add"}), rec({"concat"})}, cat, 10);
  const auto st = corpus_stats(t.puis);
  EXPECT_EQ(st.total_pus, 3u);
  EXPECT_DOUBLE_EQ(st.fraction_within_cap, 1.0);
  EXPECT_EQ(st.size_histogram.at(2), 2u);
  EXPECT_EQ(st.pus_per_signature.at("n-n"), 2u);
}

TEST(CorpusStats, EmptyIsZeroed) {
  const auto st = corpus_stats({});
  EXPECT_EQ(st.total_pus, 0u);
  EXPECT_EQ(st.fraction_within_cap, 0.0);
  EXPECT_TRUE(st.size_histogram.empty());
}

TEST(CorpusStats, SyntheticCorpusMostlyWithinTen) {
  const auto cat = default_catalog();
  SyntheticCorpusParams p;
  p.n_pus = 50000;
  const auto all = to_puis(generate_synthetic_corpus(p, cat), cat, static_cast<std::size_t>(-1));
  EXPECT_EQ(all.discarded, 0u);
  EXPECT_GE(corpus_stats(all.puis, 10).fraction_within_cap, 0.85);
}

// --- properties ----------------------------------------------------------------

TEST(CorpusProperty, ConservationIdempotenceAndSignatures) {
  const auto cat = default_catalog();
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SyntheticCorpusParams p;
    p.seed = seed;
    p.n_pus = 3000;
    const auto recs = generate_synthetic_corpus(p, cat);
    const auto t = to_puis(recs, cat, 10);
    std::uint64_t total = 0;
    for (const auto& q : t.puis) {
      total += q.frequency;
      EXPECT_EQ(q.signature, subset_signature(q.instructions, cat));
      EXPECT_GE(q.frequency, 1u);
    }
    EXPECT_EQ(total + t.discarded, recs.size());

    // Re-running dedup on records rebuilt from the PUIS changes nothing.
    std::vector<PURecord> again;
    for (const auto& q : t.puis)
      for (std::uint64_t k = 0; k < q.frequency; ++k) again.push_back(rec(q.instructions));
    const auto t2 = to_puis(again, cat, 10);
    ASSERT_EQ(t2.puis.size(), t.puis.size());
    for (std::size_t i = 0; i < t.puis.size(); ++i) {
      EXPECT_EQ(t2.puis[i].instructions, t.puis[i].instructions);
      EXPECT_EQ(t2.puis[i].frequency, t.puis[i].frequency);
    }
  }
}

}  // namespace
}  // namespace tsis
