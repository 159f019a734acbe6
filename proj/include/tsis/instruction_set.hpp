#pragma once

#include <algorithm>
#include <string>
#include <vector>

namespace tsis {

// Sorted, duplicate-free list of instruction ids. All helpers below assume
// (and preserve) that shape.
using InstructionSet = std::vector<std::string>;

inline InstructionSet make_instruction_set(std::vector<std::string> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

inline bool is_subset_of(const InstructionSet& inner, const InstructionSet& outer) {
  return inner.size() <= outer.size() &&
         std::includes(outer.begin(), outer.end(), inner.begin(), inner.end());
}

inline InstructionSet set_union(const InstructionSet& a, const InstructionSet& b) {
  InstructionSet out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline std::size_t union_size(const InstructionSet& a, const InstructionSet& b) {
  std::size_t n = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++i;
      ++j;
    }
    ++n;
  }
  return n + static_cast<std::size_t>(a.end() - i) + static_cast<std::size_t>(b.end() - j);
}

inline std::size_t intersection_size(const InstructionSet& a, const InstructionSet& b) {
  return a.size() + b.size() - union_size(a, b);
}

}  // namespace tsis
