#pragma once

#include <functional>

#include "xsda/nn/tensor.hpp"
#include "xsda/raster/image.hpp"

namespace xsda::da {

/// Maps one {1,4,th,tw} tile to a {1,out_c,th,tw} tile.
using TileFn = std::function<nn::Tensor(const nn::Tensor&)>;

/// Overlap-tiled application of a fully convolutional net. Tiles are laid out
/// flush to the borders, a margin is cropped from every tile face that is not
/// an image border (discarding padding-contaminated outputs), and the kept
/// regions are blended with a cosine window normalized per pixel. Falls back
/// to a single whole-image pass when the image is smaller than a tile.
std::vector<raster::Grid> tiled_apply(const raster::MultispectralImage& image, int tile, int stride,
                                      int margin, int out_c, const TileFn& fn);

}  // namespace xsda::da
