#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

namespace tsis::detail {

// 64-bit FNV-1a, used for provenance fingerprints that must be stable across
// platforms and runs.
class Fnv1a {
 public:
  void update(std::string_view bytes) {
    for (unsigned char c : bytes) {
      state_ ^= c;
      state_ *= 0x100000001b3ULL;
    }
  }
  // Field separator so that ("ab","c") and ("a","bc") hash differently.
  void separator() { update(std::string_view("\x1f", 1)); }

  std::uint64_t value() const { return state_; }
  std::string hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(state_));
    return buf;
  }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

}  // namespace tsis::detail
