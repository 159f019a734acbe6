#include <gtest/gtest.h>

#include <set>

#include "support.hpp"

namespace tsis {
namespace {

using testing::Rng;

TypeSignature sig(const char* text) { return parse_signature(text); }

TEST(CanonicalString, SingleTypes) {
  EXPECT_EQ(canonical_string({{DataType::Array}, {DataType::String}}), "a-s");
}

TEST(CanonicalString, SortsTags) {
  EXPECT_EQ(canonical_string({{DataType::String, DataType::Array}, {DataType::Number}}), "as-n");
}

TEST(CanonicalString, FullSignature) {
  const TypeSet all{DataType::Array, DataType::Hashmap, DataType::Number, DataType::String};
  EXPECT_EQ(canonical_string({all, all}), "ahns-ahns");
}

TEST(CanonicalString, EmptySidesRenderEmpty) {
  EXPECT_EQ(canonical_string({{}, {DataType::Number}}), "-n");
  EXPECT_EQ(canonical_string({{DataType::Number}, {}}), "n-");
  EXPECT_EQ(parse_signature("-n"), (TypeSignature{{}, {DataType::Number}}));
}

TEST(ParseSignature, Hyphen) {
  const auto s = sig("a-s");
  EXPECT_EQ(s.inputs, TypeSet{DataType::Array});
  EXPECT_EQ(s.outputs, TypeSet{DataType::String});
}

TEST(ParseSignature, ColonAndUnsortedTags) {
  const auto s = sig("sa:n");
  EXPECT_EQ(s.inputs, (TypeSet{DataType::Array, DataType::String}));
  EXPECT_EQ(s.outputs, TypeSet{DataType::Number});
  EXPECT_EQ(canonical_string(s), "as-n");
}

TEST(ParseSignature, DuplicateTagsNormalize) { EXPECT_EQ(canonical_string(sig("nna-ss")), "an-s"); }

TEST(ParseSignature, RejectsUnknownTag) { EXPECT_THROW(sig("a-x"), MalformedSignature); }

TEST(ParseSignature, RejectsMissingOrRepeatedSeparator) {
  EXPECT_THROW(sig("as"), MalformedSignature);
  EXPECT_THROW(sig("a-s-n"), MalformedSignature);
  EXPECT_THROW(sig("a:s-n"), MalformedSignature);
}

TEST(Subsumes, WorkedExamples) {
  EXPECT_TRUE(subsumes(sig("as-ns"), sig("a-s")));
  EXPECT_TRUE(subsumes(sig("hn-a"), sig("hn-a")));
  EXPECT_FALSE(subsumes(sig("a-s"), sig("as-ns")));
}

TEST(Enumerate, CountsAndEndpoints) {
  const auto all = enumerate_production_signatures();
  ASSERT_EQ(all.size(), 225u);
  EXPECT_EQ(canonical_string(all.front()), "a-a");
  EXPECT_EQ(canonical_string(all.back()), "ahns-ahns");
  std::set<std::string> names, inputs;
  for (const auto& s : all) {
    names.insert(canonical_string(s));
    inputs.insert(s.inputs.tags());
    EXPECT_TRUE(s.is_production());
  }
  EXPECT_EQ(names.size(), 225u);
  EXPECT_EQ(inputs.size(), 15u);
}

TEST(Enumerate, EachSideInShortlexOrder) {
  const auto all = enumerate_production_signatures();
  for (std::size_t i = 1; i < all.size(); ++i) {
    const auto &a = all[i - 1], &b = all[i];
    if (a.inputs == b.inputs) EXPECT_TRUE(shortlex_less(a.outputs, b.outputs));
    else EXPECT_TRUE(shortlex_less(a.inputs, b.inputs));
  }
}

TEST(TypeOfValue, AllSixKinds) {
  using nlohmann::json;
  EXPECT_EQ(type_of_value(json(3.5)), DataType::Number);
  EXPECT_EQ(type_of_value(json(-2)), DataType::Number);
  EXPECT_EQ(type_of_value(json("x")), DataType::String);
  EXPECT_EQ(type_of_value(json(true)), DataType::String);
  EXPECT_EQ(type_of_value(json(nullptr)), DataType::String);
  EXPECT_EQ(type_of_value(json::array({1, 2})), DataType::Array);
  EXPECT_EQ(type_of_value(json::parse(R"({"k":1})")), DataType::Hashmap);
}

// --- properties ----------------------------------------------------------------

TypeSignature random_signature(Rng& rng) {
  return {TypeSet::from_bits(static_cast<std::uint8_t>(testing::uniform_below(rng, 16))),
          TypeSet::from_bits(static_cast<std::uint8_t>(testing::uniform_below(rng, 16)))};
}

TEST(TypesigProperty, RoundTripIsIdempotent) {
  for (unsigned in = 0; in < 16; ++in)
    for (unsigned out = 0; out < 16; ++out) {
      const TypeSignature s{TypeSet::from_bits(in), TypeSet::from_bits(out)};
      const auto text = canonical_string(s);
      EXPECT_EQ(parse_signature(text), s);
      EXPECT_EQ(canonical_string(parse_signature(text)), text);
    }
}

TEST(TypesigProperty, SubsumesIsPartialOrder) {
  Rng rng(7);
  for (int i = 0; i < 5000; ++i) {
    const auto x = random_signature(rng), y = random_signature(rng), z = random_signature(rng);
    EXPECT_TRUE(subsumes(x, x));
    if (subsumes(x, y) && subsumes(y, x)) {
      EXPECT_EQ(canonical_string(x), canonical_string(y));
    }
    if (subsumes(x, y) && subsumes(y, z)) {
      EXPECT_TRUE(subsumes(x, z));
    }
  }
}

TEST(TypesigProperty, RandomTagMultisetsLandInEnumeration) {
  std::set<std::string> names;
  for (const auto& s : enumerate_production_signatures()) names.insert(canonical_string(s));
  Rng rng(11);
  const char tags[] = "ahns";
  for (int i = 0; i < 2000; ++i) {
    std::string left, right;
    for (auto n = 1 + testing::uniform_below(rng, 6); n > 0; --n) left += tags[testing::uniform_below(rng, 4)];
    for (auto n = 1 + testing::uniform_below(rng, 6); n > 0; --n) right += tags[testing::uniform_below(rng, 4)];
    EXPECT_TRUE(names.count(canonical_string(parse_signature(left + ":" + right)))) << left << ":" << right;
  }
}

}  // namespace
}  // namespace tsis
