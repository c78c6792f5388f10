#pragma once

#include "xsda/da/tiling.hpp"
#include "xsda/models/zoo.hpp"

namespace xsda::da {

inline constexpr int kAdaptTile = 64;
inline constexpr int kAdaptStride = 32;  // 50% overlap
inline constexpr int kAdaptMargin = 8;

/// Applies a trained PV->LU generator to a full image: 64x64 tiles with 50%
/// overlap, cosine-blended, output clipped to [0, 1.5]. Output dims equal
/// input dims; validity and georeferencing carry over.
raster::MultispectralImage adapt_image(const raster::MultispectralImage& pv,
                                       models::GeneratorNet& g);

/// Builds a generator and loads it from a checkpoint directory (the PV->LU
/// network of a DA run, or any saved GENERATOR). Throws on kind mismatch.
std::unique_ptr<models::GeneratorNet> load_generator(const std::string& ckpt_dir,
                                                     const std::string& name = "g_pv2lu");

}  // namespace xsda::da
