#pragma once

#include <cstdint>
#include <string>

namespace xsda::util {

inline uint64_t fnv1a64(const void* data, size_t n, uint64_t h = 1469598103934665603ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

inline uint64_t fnv1a64(const std::string& s) { return fnv1a64(s.data(), s.size()); }

/// FNV-1a over a file's bytes (input fingerprints in run manifests).
uint64_t file_fnv64(const std::string& path);

}  // namespace xsda::util
