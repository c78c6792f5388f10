#pragma once

#include <array>
#include <vector>

#include "xsda/raster/image.hpp"

namespace xsda::eval {

/// Per-band normalized reflectance histograms pooled over all valid pixels of
/// all images; out-of-range values clip into the end bins so mass sums to 1.
struct BandHistograms {
  int bins = 256;
  double lo = 0.0, hi = 1.2;
  std::array<std::vector<double>, raster::kNumBands> h;
  std::array<int64_t, raster::kNumBands> n_pixels{};
};

BandHistograms band_histograms(const std::vector<const raster::MultispectralImage*>& images,
                               int bins = 256, double lo = 0.0, double hi = 1.2);

/// Per-band L1 distance sum|h1-h2|, in [0,2]. Binning must match.
std::array<double, raster::kNumBands> histogram_distance(const BandHistograms& a,
                                                         const BandHistograms& b);

}  // namespace xsda::eval
