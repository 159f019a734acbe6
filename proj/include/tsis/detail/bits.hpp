#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "tsis/instruction_set.hpp"

namespace tsis::detail {

using Bits = std::vector<std::uint64_t>;

// Dense bit encoding of instruction sets over a fixed id universe. Bit order
// follows sorted id order, so decoding yields a sorted InstructionSet.
class IdUniverse {
 public:
  template <typename Sets>
  explicit IdUniverse(const Sets& sets) {
    for (const auto& s : sets)
      for (const auto& id : s) ids_.push_back(id);
    std::sort(ids_.begin(), ids_.end());
    ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
    index_.reserve(ids_.size());
    for (std::size_t i = 0; i < ids_.size(); ++i) index_.emplace(ids_[i], i);
    words_ = std::max<std::size_t>(1, (ids_.size() + 63) / 64);
  }

  std::size_t words() const { return words_; }

  Bits encode(const InstructionSet& set) const {
    Bits b(words_, 0);
    for (const auto& id : set) {
      const auto i = index_.at(id);
      b[i / 64] |= std::uint64_t{1} << (i % 64);
    }
    return b;
  }

  InstructionSet decode(const Bits& b) const {
    InstructionSet out;
    for (std::size_t w = 0; w < b.size(); ++w)
      for (std::uint64_t x = b[w]; x != 0; x &= x - 1)
        out.push_back(ids_[w * 64 + static_cast<std::size_t>(std::countr_zero(x))]);
    return out;
  }

 private:
  std::vector<std::string> ids_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t words_ = 1;
};

inline bool bits_subset(const Bits& inner, const Bits& outer) {
  for (std::size_t i = 0; i < inner.size(); ++i)
    if ((inner[i] & ~outer[i]) != 0) return false;
  return true;
}

inline std::size_t bits_count(const Bits& a) {
  std::size_t n = 0;
  for (auto w : a) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

inline std::size_t bits_union_count(const Bits& a, const Bits& b) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) n += static_cast<std::size_t>(std::popcount(a[i] | b[i]));
  return n;
}

inline std::size_t bits_intersection_count(const Bits& a, const Bits& b) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) n += static_cast<std::size_t>(std::popcount(a[i] & b[i]));
  return n;
}

inline void bits_or_assign(Bits& a, const Bits& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] |= b[i];
}

}  // namespace tsis::detail
