#pragma once

#include <array>
#include <map>
#include <string>

#include "xsda/raster/image.hpp"

namespace xsda::harmonize {

using raster::Band;
using raster::CloudMask;
using raster::Grid;
using raster::MultispectralImage;

/// FWHM of a Gaussian = 2*sqrt(2 ln 2) * sigma.
inline constexpr double kFwhmPerSigma = 2.3548200450309493;

/// Per-band spatial model of the target sensor: nominal GSD at nadir and the
/// matching Gaussian PSF sigma in input-pixel units under the FWHM = GSD rule.
struct SensorBandModel {
  Band band;
  double gsd_m;
  double sigma_px;
};

/// The four target-band models for a given input pixel size (default 30 m).
/// BLUE/RED/NIR use a 96.9 m GSD, SWIR 184.7 m, so the SWIR PSF is about
/// twice as wide as the others.
std::array<SensorBandModel, raster::kNumBands> target_band_models(double input_res_m = 30.0);

/// 0.25*b1 + 0.75*b2, the fixed SRF-overlap weighting for the blue band.
Grid blend_blue(const Grid& b1, const Grid& b2);

/// Picks the four overlapping source bands out of a B1..B7 stack:
/// BLUE = blend_blue(B1,B2), RED = B4, NIR = B5, SWIR = B6.
MultispectralImage select_bands(const std::map<std::string, Grid>& l8_bands);

/// Reflect-padded convolution with a normalized 2-D Gaussian (separable).
Grid gaussian_filter(const Grid& band, double sigma_px);

/// PSF simulation step: gaussian_filter with the band model's sigma.
Grid psf_filter(const Grid& band, const SensorBandModel& model);

/// Decimation by 3: out[i,j] = in[3i,3j].
Grid subsample3(const Grid& band);

/// Separable Lanczos-3 resampling from in_res_m to out_res_m pixel size with
/// per-output-site kernel renormalization (kernel taps outside the image are
/// dropped and the remaining weights rescaled to sum 1). Output dims are
/// round(dim * in_res/out_res).
Grid lanczos_resample(const Grid& band, double in_res_m, double out_res_m);

/// Full per-band chain psf_filter -> subsample3 -> lanczos_resample at the
/// nominal resolutions 30 -> 90 -> 333 m.
Grid upscale_band(const Grid& band30, const SensorBandModel& model);

struct UpscaleResult {
  MultispectralImage image;  // LU domain, 333 m
};

/// select_bands + per-band upscale chain; bands are cropped to the minimum
/// common output dims. Optional 30 m validity propagates: a 333 m pixel is
/// invalid when any contributing 30 m pixel was invalid.
UpscaleResult upscale_l8(const std::map<std::string, Grid>& l8_bands,
                         const std::array<SensorBandModel, raster::kNumBands>& models,
                         const raster::ByteGrid* validity30 = nullptr);

/// Labels go through the identical float chain (BLUE model) and are
/// thresholded at 0.5, ties cloudy. Invalid labels (255) propagate to every
/// 333 m pixel they contribute to.
CloudMask upscale_labels(const CloudMask& mask30,
                         const std::array<SensorBandModel, raster::kNumBands>& models);

}  // namespace xsda::harmonize
