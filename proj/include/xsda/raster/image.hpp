#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>

#include "xsda/raster/grid.hpp"

namespace xsda::raster {

enum class Band : int { BLUE = 0, RED = 1, NIR = 2, SWIR = 3 };
inline constexpr int kNumBands = 4;
inline constexpr std::array<const char*, kNumBands> kBandNames = {"BLUE", "RED", "NIR", "SWIR"};

enum class DomainTag { L8_30M, LU_333M, PV_333M, PV_ADAPTED_333M };

const char* to_string(DomainTag tag);
DomainTag domain_tag_from_string(const std::string& s);

/// Nominal resolution in meters implied by a domain tag.
inline double domain_resolution_m(DomainTag tag) { return tag == DomainTag::L8_30M ? 30.0 : 333.0; }

/// Affine geotransform (GDAL convention): x = x0 + col*px; y = y0 + row*py (py < 0 for north-up).
struct GeoTransform {
  double x0 = 0, y0 = 0, px = 1, py = -1;
};

/// 4-band TOA reflectance raster plus validity. Invalid pixels hold 0 in the
/// band planes; validity is the single source of truth for them.
struct MultispectralImage {
  std::array<Grid, kNumBands> bands;
  ByteGrid validity;  // 1 = valid, 0 = invalid
  double resolution_m = 333.0;
  DomainTag domain_tag = DomainTag::PV_333M;
  std::optional<GeoTransform> geo;

  MultispectralImage() = default;
  MultispectralImage(int h, int w, DomainTag tag)
      : validity(h, w, 1), resolution_m(domain_resolution_m(tag)), domain_tag(tag) {
    for (auto& b : bands) b = Grid(h, w, 0.f);
  }

  int height() const { return bands[0].h; }
  int width() const { return bands[0].w; }
  Grid& band(Band b) { return bands[static_cast<int>(b)]; }
  const Grid& band(Band b) const { return bands[static_cast<int>(b)]; }

  /// Throws unless all four bands and the validity plane share one shape and
  /// the domain tag agrees with resolution_m.
  void check() const;
};

inline constexpr uint8_t kClear = 0;
inline constexpr uint8_t kCloudy = 1;
inline constexpr uint8_t kInvalidLabel = 255;

/// Per-pixel cloud labels: 0 clear, 1 cloudy, 255 invalid.
struct CloudMask {
  ByteGrid labels;
  double resolution_m = 333.0;

  CloudMask() = default;
  CloudMask(int h, int w, double res, uint8_t fill = kClear) : labels(h, w, fill), resolution_m(res) {}
  int height() const { return labels.h; }
  int width() const { return labels.w; }
};

/// Per-band bad-radiometry flags, true (1) = bad quality.
struct QualityMask {
  std::array<ByteGrid, kNumBands> planes;

  QualityMask() = default;
  QualityMask(int h, int w) {
    for (auto& p : planes) p = ByteGrid(h, w, 0);
  }
  int height() const { return planes[0].h; }
  int width() const { return planes[0].w; }
  ByteGrid& plane(Band b) { return planes[static_cast<int>(b)]; }
  const ByteGrid& plane(Band b) const { return planes[static_cast<int>(b)]; }
  /// True when any band flags the pixel.
  bool any_bad(int r, int c) const {
    for (const auto& p : planes)
      if (p.at(r, c)) return true;
    return false;
  }
};

}  // namespace xsda::raster
