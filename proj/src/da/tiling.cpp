#include "xsda/da/tiling.hpp"

#include <cmath>

#include "xsda/raster/patches.hpp"

namespace xsda::da {

using nn::Tensor;
using raster::Grid;

namespace {

Tensor tile_tensor(const raster::MultispectralImage& img, int r0, int c0, int th, int tw) {
  Tensor t({1, raster::kNumBands, th, tw});
  float* dst = t.ptr();
  for (int b = 0; b < raster::kNumBands; ++b)
    for (int r = 0; r < th; ++r)
      for (int c = 0; c < tw; ++c) *dst++ = img.bands[b].at(r0 + r, c0 + c);
  return t;
}

// raised-cosine blending weight over a cropped extent, floored away from zero
std::vector<float> window(int len) {
  std::vector<float> w(len);
  for (int i = 0; i < len; ++i)
    w[i] = 1e-3f + 0.5f - 0.5f * std::cos(2.0 * M_PI * (i + 0.5) / len);
  return w;
}

}  // namespace

std::vector<Grid> tiled_apply(const raster::MultispectralImage& image, int tile, int stride,
                              int margin, int out_c, const TileFn& fn) {
  const int h = image.height(), w = image.width();
  std::vector<Grid> out(out_c, Grid(h, w, 0.f));

  if (h <= tile && w <= tile) {
    const Tensor y = fn(tile_tensor(image, 0, 0, h, w));
    for (int b = 0; b < out_c; ++b)
      for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) out[b].at(r, c) = y.ptr()[(b * h + r) * w + c];
    return out;
  }
  if (h < tile || w < tile)
    throw std::runtime_error("tiled_apply: image thinner than a tile in one axis only");

  Grid wsum(h, w, 0.f);
  std::vector<Grid> acc(out_c, Grid(h, w, 0.f));
  for (int r0 : raster::tile_offsets(h, tile, stride)) {
    for (int c0 : raster::tile_offsets(w, tile, stride)) {
      const Tensor y = fn(tile_tensor(image, r0, c0, tile, tile));
      const int mt = r0 > 0 ? margin : 0, mb = r0 + tile < h ? margin : 0;
      const int ml = c0 > 0 ? margin : 0, mr = c0 + tile < w ? margin : 0;
      const auto wr = window(tile - mt - mb);
      const auto wc = window(tile - ml - mr);
      for (int r = mt; r < tile - mb; ++r)
        for (int c = ml; c < tile - mr; ++c) {
          const float wgt = wr[r - mt] * wc[c - ml];
          wsum.at(r0 + r, c0 + c) += wgt;
          for (int b = 0; b < out_c; ++b)
            acc[b].at(r0 + r, c0 + c) += wgt * y.ptr()[(b * tile + r) * tile + c];
        }
    }
  }
  for (int b = 0; b < out_c; ++b)
    for (size_t i = 0; i < acc[b].v.size(); ++i) out[b].v[i] = acc[b].v[i] / wsum.v[i];
  return out;
}

}  // namespace xsda::da
