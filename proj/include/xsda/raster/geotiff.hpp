#pragma once

#include <optional>
#include <string>
#include <vector>

#include "xsda/raster/image.hpp"

namespace xsda::raster {

/// Default nodata marker written into band planes at invalid pixels.
inline constexpr double kDefaultNodata = 65535.0;

struct TiffInfo {
  int h = 0;
  int w = 0;
  int n_bands = 0;
  std::optional<double> nodata;
  std::optional<GeoTransform> geo;
};

/// Reads an uncompressed strip-based TIFF (uint8/uint16/float32, chunky planar
/// layout). Bands come back as float planes in file order.
TiffInfo read_geotiff(const std::string& path, std::vector<Grid>& bands);

void write_geotiff_f32(const std::string& path, const std::vector<const Grid*>& bands,
                       std::optional<double> nodata, const std::optional<GeoTransform>& geo);

void write_geotiff_u8(const std::string& path, const std::vector<const ByteGrid*>& bands,
                      const std::optional<GeoTransform>& geo);

/// Loads a multispectral image. band_order[i] names the role of file band i:
/// one of BLUE/RED/NIR/SWIR, or "-" to skip; each role must appear exactly once.
/// Validity is derived from the file's declared nodata (any band hit -> invalid).
MultispectralImage load_image(const std::string& path, const std::vector<std::string>& band_order,
                              DomainTag tag = DomainTag::PV_333M);

inline const std::vector<std::string> kDefaultBandOrder = {"BLUE", "RED", "NIR", "SWIR"};

/// Writes bands in the contract order BLUE,RED,NIR,SWIR; invalid pixels are
/// stored as the nodata value 65535.
void save_image(const MultispectralImage& image, const std::string& path);

CloudMask load_cloud_mask(const std::string& path);
void save_cloud_mask(const CloudMask& mask, const std::string& path);

QualityMask load_quality_mask(const std::string& path);
void save_quality_mask(const QualityMask& mask, const std::string& path);

}  // namespace xsda::raster
