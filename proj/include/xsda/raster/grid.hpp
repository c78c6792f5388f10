#pragma once

#include <cassert>
#include <cstdint>
#include <vector>

namespace xsda::raster {

/// Row-major H x W float raster plane.
struct Grid {
  int h = 0;
  int w = 0;
  std::vector<float> v;

  Grid() = default;
  Grid(int h_, int w_, float fill = 0.f) : h(h_), w(w_), v(static_cast<size_t>(h_) * w_, fill) {}

  float& at(int r, int c) { return v[static_cast<size_t>(r) * w + c]; }
  float at(int r, int c) const { return v[static_cast<size_t>(r) * w + c]; }
  size_t size() const { return v.size(); }
  bool same_shape(const Grid& o) const { return h == o.h && w == o.w; }
};

/// Row-major H x W byte plane (masks, labels).
struct ByteGrid {
  int h = 0;
  int w = 0;
  std::vector<uint8_t> v;

  ByteGrid() = default;
  ByteGrid(int h_, int w_, uint8_t fill = 0) : h(h_), w(w_), v(static_cast<size_t>(h_) * w_, fill) {}

  uint8_t& at(int r, int c) { return v[static_cast<size_t>(r) * w + c]; }
  uint8_t at(int r, int c) const { return v[static_cast<size_t>(r) * w + c]; }
  size_t size() const { return v.size(); }
  bool same_shape(const ByteGrid& o) const { return h == o.h && w == o.w; }
};

}  // namespace xsda::raster
