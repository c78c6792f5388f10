#pragma once

#include <array>
#include <vector>

#include "xsda/raster/image.hpp"

namespace xsda::eval {

struct DiffSummary {
  int64_t n = 0;
  double mean = 0, stddev = 0;
  std::array<double, 5> quantiles{};  // p5, p25, p50, p75, p95
  std::vector<double> hist;           // normalized over [lo,hi]
};

/// Per-band empirical distributions of (pv - adapted), split by that band's
/// radiometric-quality flag, over valid pixels.
struct ToaDiffStats {
  int bins = 256;
  double lo = -0.6, hi = 0.6;
  std::array<DiffSummary, raster::kNumBands> good, bad;
};

ToaDiffStats toa_difference_stats(const raster::MultispectralImage& pv,
                                  const raster::MultispectralImage& adapted,
                                  const raster::QualityMask& quality, int bins = 256,
                                  double lo = -0.6, double hi = 0.6);

}  // namespace xsda::eval
