#pragma once

#include "xsda/models/zoo.hpp"
#include "xsda/raster/image.hpp"

namespace xsda::cloud {

inline constexpr int kPredictTile = 32;
inline constexpr int kPredictStride = 16;  // 50% overlap
inline constexpr int kPredictMargin = 4;

struct CloudPrediction {
  raster::Grid probability;  // [0,1]
  raster::CloudMask mask;    // prob >= threshold -> cloudy; invalid input -> 255
};

/// Tiled inference over the valid bounding box (32x32 tiles, 50% overlap,
/// blended). Probabilities outside the valid region are 0 and masked 255, so
/// the map is unchanged by invalid-marked border padding.
CloudPrediction predict_cloud(const raster::MultispectralImage& image, models::CloudUNet& net,
                              float threshold = 0.5f);

/// Builds a CLOUD_UNET and loads it from a checkpoint directory.
std::unique_ptr<models::CloudUNet> load_cloud_net(const std::string& ckpt_dir,
                                                  const std::string& name = "cloud_seed0");

}  // namespace xsda::cloud
