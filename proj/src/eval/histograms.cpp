#include "xsda/eval/histograms.hpp"

#include <algorithm>
#include <stdexcept>

namespace xsda::eval {

BandHistograms band_histograms(const std::vector<const raster::MultispectralImage*>& images,
                               int bins, double lo, double hi) {
  if (images.empty()) throw std::runtime_error("band_histograms: empty input");
  BandHistograms out;
  out.bins = bins;
  out.lo = lo;
  out.hi = hi;
  for (auto& h : out.h) h.assign(bins, 0.0);

  const double scale = bins / (hi - lo);
  for (const auto* img : images) {
    for (int b = 0; b < raster::kNumBands; ++b) {
      const auto& band = img->bands[b];
      for (size_t i = 0; i < band.v.size(); ++i) {
        if (!img->validity.v[i]) continue;
        int bin = static_cast<int>((band.v[i] - lo) * scale);
        bin = std::clamp(bin, 0, bins - 1);
        out.h[b][bin] += 1.0;
        ++out.n_pixels[b];
      }
    }
  }
  for (int b = 0; b < raster::kNumBands; ++b) {
    if (out.n_pixels[b] == 0) throw std::runtime_error("band_histograms: no valid pixels");
    for (auto& v : out.h[b]) v /= static_cast<double>(out.n_pixels[b]);
  }
  return out;
}

std::array<double, raster::kNumBands> histogram_distance(const BandHistograms& a,
                                                         const BandHistograms& b) {
  if (a.bins != b.bins || a.lo != b.lo || a.hi != b.hi)
    throw std::runtime_error("histogram_distance: binning differs");
  std::array<double, raster::kNumBands> d{};
  for (int band = 0; band < raster::kNumBands; ++band)
    for (int i = 0; i < a.bins; ++i) d[band] += std::abs(a.h[band][i] - b.h[band][i]);
  return d;
}

}  // namespace xsda::eval
