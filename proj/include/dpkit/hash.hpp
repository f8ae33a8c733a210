#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace dpkit {

// FNV-1a, used for cache keys, stable record ids, and config hashes.
// Stable across runs and platforms, unlike std::hash.
inline std::uint64_t fnv1a64(std::string_view data,
                             std::uint64_t seed = 1469598103934665603ULL) {
  std::uint64_t h = seed;
  for (unsigned char c : data) {
    h ^= static_cast<std::uint64_t>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string to_hex(std::uint64_t value) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[value & 0xF];
    value >>= 4;
  }
  return out;
}

inline std::string content_hash(std::string_view data) {
  return to_hex(fnv1a64(data));
}

}  // namespace dpkit
