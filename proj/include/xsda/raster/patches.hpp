#pragma once

#include <cstdint>
#include <vector>

#include "xsda/raster/image.hpp"

namespace xsda::raster {

struct PatchProvenance {
  int64_t source_id = 0;
  int row = 0;
  int col = 0;
};

/// Fixed-size square 4xSxS patches (band-major within a patch) plus provenance.
/// When built from a labeled image, per-pixel labels ride along (SxS per patch).
struct PatchSet {
  int patch_size = 0;
  std::vector<float> data;      // count * 4 * S * S
  std::vector<uint8_t> labels;  // count * S * S, empty when unlabeled
  std::vector<PatchProvenance> prov;

  int64_t count() const { return static_cast<int64_t>(prov.size()); }
  int64_t patch_floats() const { return static_cast<int64_t>(kNumBands) * patch_size * patch_size; }
  const float* patch(int64_t i) const { return data.data() + i * patch_floats(); }
  const uint8_t* label(int64_t i) const {
    return labels.data() + i * static_cast<int64_t>(patch_size) * patch_size;
  }
  bool labeled() const { return !labels.empty(); }
};

/// Tile start offsets {0, stride, 2*stride, ...} with a final offset clamped
/// flush to the edge when (dim - size) is not a multiple of stride.
std::vector<int> tile_offsets(int dim, int size, int stride);

/// Tiles an image into patches; offsets follow tile_offsets along both axes.
/// Pass the aligned cloud mask to get labeled patches. Throws if size exceeds
/// either image dimension.
PatchSet extract_patches(const MultispectralImage& image, int size, int stride,
                         const CloudMask* mask = nullptr, int64_t source_id = 0);

/// Appends another image's patches into an existing set (pool building).
void extract_patches_into(PatchSet& out, const MultispectralImage& image, int size, int stride,
                          const CloudMask* mask = nullptr, int64_t source_id = 0);

/// Pastes patch i back at its recorded offset (test/repro helper).
void paste_patch(const PatchSet& set, int64_t i, MultispectralImage& target);

}  // namespace xsda::raster
