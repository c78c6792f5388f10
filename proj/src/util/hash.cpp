#include "xsda/util/hash.hpp"

#include <fstream>
#include <stdexcept>
#include <vector>

namespace xsda::util {

uint64_t file_fnv64(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("missing input: " + path);
  uint64_t h = 1469598103934665603ull;
  std::vector<char> buf(1 << 16);
  while (f) {
    f.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    h = fnv1a64(buf.data(), static_cast<size_t>(f.gcount()), h);
  }
  return h;
}

}  // namespace xsda::util
