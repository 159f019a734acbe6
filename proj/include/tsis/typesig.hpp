#pragma once

// The four-type data model (array, hashmap, number, string) and the
// input/output type-signature algebra built on it.

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tsis/error.hpp"

namespace tsis {

// Enumerator values follow the alphabetical order of the tags.
enum class DataType : std::uint8_t { Array = 0, Hashmap = 1, Number = 2, String = 3 };

inline constexpr std::array<DataType, 4> kAllDataTypes = {DataType::Array, DataType::Hashmap,
                                                          DataType::Number, DataType::String};

constexpr char tag_of(DataType t) {
  constexpr char tags[] = {'a', 'h', 'n', 's'};
  return tags[static_cast<int>(t)];
}

constexpr std::optional<DataType> data_type_from_tag(char c) {
  switch (c) {
    case 'a': return DataType::Array;
    case 'h': return DataType::Hashmap;
    case 'n': return DataType::Number;
    case 's': return DataType::String;
    default: return std::nullopt;
  }
}

// A set over the four data types, stored as a 4-bit mask.
class TypeSet {
 public:
  constexpr TypeSet() = default;
  constexpr TypeSet(std::initializer_list<DataType> types) {
    for (DataType t : types) insert(t);
  }
  static constexpr TypeSet from_bits(std::uint8_t bits) {
    TypeSet s;
    s.bits_ = bits & 0x0F;
    return s;
  }

  constexpr void insert(DataType t) { bits_ |= bit(t); }
  constexpr bool contains(DataType t) const { return (bits_ & bit(t)) != 0; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::uint8_t bits() const { return bits_; }
  constexpr int size() const {
    int n = 0;
    for (std::uint8_t b = bits_; b != 0; b &= static_cast<std::uint8_t>(b - 1)) ++n;
    return n;
  }
  constexpr bool is_subset_of(TypeSet other) const { return (bits_ & ~other.bits_) == 0; }

  constexpr TypeSet& operator|=(TypeSet o) {
    bits_ |= o.bits_;
    return *this;
  }
  friend constexpr TypeSet operator|(TypeSet a, TypeSet b) { return a |= b; }
  friend constexpr bool operator==(TypeSet, TypeSet) = default;

  // Tags in alphabetical order, e.g. "as".
  std::string tags() const {
    std::string out;
    for (DataType t : kAllDataTypes)
      if (contains(t)) out.push_back(tag_of(t));
    return out;
  }

 private:
  static constexpr std::uint8_t bit(DataType t) {
    return static_cast<std::uint8_t>(1u << static_cast<unsigned>(t));
  }
  std::uint8_t bits_ = 0;
};

struct TypeSignature {
  TypeSet inputs;
  TypeSet outputs;

  friend constexpr bool operator==(const TypeSignature&, const TypeSignature&) = default;

  // Both sides non-empty: one of the 225 production signatures.
  constexpr bool is_production() const { return !inputs.empty() && !outputs.empty(); }
};

inline constexpr char kSignatureSeparator = '-';

inline std::string canonical_string(const TypeSignature& sig) {
  return sig.inputs.tags() + kSignatureSeparator + sig.outputs.tags();
}

// Accepts '-' or ':' as separator, unsorted and repeated tags, and either
// side empty. Whitespace is not accepted.
inline TypeSignature parse_signature(std::string_view text) {
  const auto sep = text.find_first_of("-:");
  if (sep == std::string_view::npos)
    throw MalformedSignature(std::string(text), "missing '-' or ':' separator");
  if (text.find_first_of("-:", sep + 1) != std::string_view::npos)
    throw MalformedSignature(std::string(text), "more than one separator");

  auto parse_side = [&](std::string_view side) {
    TypeSet set;
    for (char c : side) {
      auto t = data_type_from_tag(c);
      if (!t)
        throw MalformedSignature(std::string(text), std::string("unknown type tag '") + c + "'");
      set.insert(*t);
    }
    return set;
  };
  return TypeSignature{parse_side(text.substr(0, sep)), parse_side(text.substr(sep + 1))};
}

// True iff `ts1` is subsumed by `ts2`: every input and output type of ts1 is
// present in ts2.
constexpr bool subsumes(const TypeSignature& ts2, const TypeSignature& ts1) {
  return ts1.inputs.is_subset_of(ts2.inputs) && ts1.outputs.is_subset_of(ts2.outputs);
}

// Shortlex order on type sets: fewer types first, then alphabetical tags.
inline bool shortlex_less(TypeSet a, TypeSet b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a.tags() < b.tags();
}

// All 15 x 15 signatures with non-empty sides, inputs major, each side in
// shortlex order: "a-a", "a-h", ..., "ahns-ahns".
inline std::vector<TypeSignature> enumerate_production_signatures() {
  std::vector<TypeSet> sets;
  for (std::uint8_t b = 1; b < 16; ++b) sets.push_back(TypeSet::from_bits(b));
  std::sort(sets.begin(), sets.end(), shortlex_less);
  std::vector<TypeSignature> out;
  out.reserve(225);
  for (TypeSet in : sets)
    for (TypeSet outs : sets) out.push_back({in, outs});
  return out;
}

// Top-level JSON typing: booleans and nulls count as strings.
inline DataType type_of_value(const nlohmann::json& v) {
  switch (v.type()) {
    case nlohmann::json::value_t::number_integer:
    case nlohmann::json::value_t::number_unsigned:
    case nlohmann::json::value_t::number_float:
      return DataType::Number;
    case nlohmann::json::value_t::array:
      return DataType::Array;
    case nlohmann::json::value_t::object:
      return DataType::Hashmap;
    default:
      return DataType::String;
  }
}

}  // namespace tsis
