#include "xsda/raster/patches.hpp"

#include <stdexcept>
#include <string>

namespace xsda::raster {

std::vector<int> tile_offsets(int dim, int size, int stride) {
  std::vector<int> out;
  const int last = dim - size;
  for (int o = 0;; o += stride) {
    if (o >= last) {
      out.push_back(last);
      break;
    }
    out.push_back(o);
  }
  return out;
}

void extract_patches_into(PatchSet& out, const MultispectralImage& image, int size, int stride,
                          const CloudMask* mask, int64_t source_id) {
  const int h = image.height(), w = image.width();
  if (size > h || size > w)
    throw std::runtime_error("patch size " + std::to_string(size) + " larger than image " +
                             std::to_string(h) + "x" + std::to_string(w));
  if (stride < 1) throw std::runtime_error("stride must be >= 1");
  if (mask && (mask->height() != h || mask->width() != w))
    throw std::runtime_error("mask shape does not match image");
  if (out.count() == 0) out.patch_size = size;
  if (out.patch_size != size) throw std::runtime_error("mixed patch sizes in one set");
  if (mask && out.count() > 0 && !out.labeled())
    throw std::runtime_error("cannot mix labeled and unlabeled patches");

  const auto rows = tile_offsets(h, size, stride);
  const auto cols = tile_offsets(w, size, stride);
  for (int r0 : rows) {
    for (int c0 : cols) {
      for (int b = 0; b < kNumBands; ++b) {
        const Grid& g = image.bands[b];
        for (int r = 0; r < size; ++r) {
          const float* src = &g.v[static_cast<size_t>(r0 + r) * w + c0];
          out.data.insert(out.data.end(), src, src + size);
        }
      }
      if (mask) {
        for (int r = 0; r < size; ++r) {
          const uint8_t* src = &mask->labels.v[static_cast<size_t>(r0 + r) * w + c0];
          out.labels.insert(out.labels.end(), src, src + size);
        }
      }
      out.prov.push_back({source_id, r0, c0});
    }
  }
}

PatchSet extract_patches(const MultispectralImage& image, int size, int stride,
                         const CloudMask* mask, int64_t source_id) {
  PatchSet out;
  out.patch_size = size;
  extract_patches_into(out, image, size, stride, mask, source_id);
  return out;
}

void paste_patch(const PatchSet& set, int64_t i, MultispectralImage& target) {
  const int s = set.patch_size;
  const auto& p = set.prov[i];
  const float* src = set.patch(i);
  for (int b = 0; b < kNumBands; ++b) {
    Grid& g = target.bands[b];
    for (int r = 0; r < s; ++r)
      for (int c = 0; c < s; ++c) g.at(p.row + r, p.col + c) = src[(b * s + r) * s + c];
  }
}

}  // namespace xsda::raster
