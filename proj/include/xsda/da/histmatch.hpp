#pragma once

#include <array>
#include <vector>

#include <nlohmann/json.hpp>

#include "xsda/raster/patches.hpp"

namespace xsda::da {

/// Per-band monotone quantile map from the source (PV) distribution to the
/// target (LU) distribution, stored as matched quantile knots; values outside
/// the fit range clamp to the endpoint knots.
struct HistogramMatchModel {
  int n_quantiles = 1024;
  std::array<std::vector<float>, raster::kNumBands> src_q, dst_q;
  std::array<bool, raster::kNumBands> degenerate{};  // constant band -> identity map

  float apply_value(int band, float v) const;

  nlohmann::json to_json() const;
  static HistogramMatchModel from_json(const nlohmann::json& j);
};

/// Fits the per-band maps from two unpaired pixel pools via matched empirical
/// quantiles at levels k/(n-1). A constant source band degenerates to the
/// identity map (with a warning recorded on the model).
HistogramMatchModel histogram_match_fit(const raster::PatchSet& pv_pool,
                                        const raster::PatchSet& lu_pool, int n_quantiles = 1024);

/// Same fit from whole images; only valid pixels enter the pools.
HistogramMatchModel histogram_match_fit_images(
    const std::vector<const raster::MultispectralImage*>& pv,
    const std::vector<const raster::MultispectralImage*>& lu, int n_quantiles = 1024);

/// Elementwise application of the per-band maps (invalid pixels untouched).
raster::MultispectralImage histogram_match_apply(const raster::MultispectralImage& image,
                                                 const HistogramMatchModel& model);

}  // namespace xsda::da
