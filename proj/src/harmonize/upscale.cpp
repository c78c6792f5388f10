#include "xsda/harmonize/upscale.hpp"

#include <cmath>
#include <stdexcept>

namespace xsda::harmonize {

namespace {

constexpr double kBlueGsd = 96.9;
constexpr double kSwirGsd = 184.7;
constexpr double kRes30 = 30.0, kRes90 = 90.0, kRes333 = 333.0;

int reflect_index(int i, int n) {
  // mirror without repeating the edge sample: -1 -> 1, n -> n-2
  if (n == 1) return 0;
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * n - 2 - i;
  }
  return i;
}

std::vector<float> gaussian_kernel_1d(double sigma, int& radius) {
  radius = std::max(1, static_cast<int>(std::ceil(4.0 * sigma)));
  std::vector<float> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double v = std::exp(-0.5 * (i * i) / (sigma * sigma));
    k[i + radius] = static_cast<float>(v);
    sum += v;
  }
  for (auto& v : k) v = static_cast<float>(v / sum);
  return k;
}

double lanczos3(double t) {
  constexpr double a = 3.0;
  if (t == 0.0) return 1.0;
  if (std::abs(t) >= a) return 0.0;
  const double pt = M_PI * t;
  return a * std::sin(pt) * std::sin(pt / a) / (pt * pt);
}

// One axis of the separable Lanczos resample: weights per output site over
// in-bounds taps only, renormalized to sum 1.
struct AxisPlan {
  std::vector<int> start;         // first tap index per output site
  std::vector<int> len;           // tap count per output site
  std::vector<float> weights;     // concatenated per-site weights
  std::vector<size_t> weight_at;  // offset into weights per site
};

AxisPlan plan_axis(int in_dim, int out_dim, double scale) {
  AxisPlan p;
  const double support = 3.0 / scale;
  p.start.resize(out_dim);
  p.len.resize(out_dim);
  p.weight_at.resize(out_dim);
  for (int j = 0; j < out_dim; ++j) {
    const double x = (j + 0.5) / scale - 0.5;
    int lo = static_cast<int>(std::ceil(x - support));
    int hi = static_cast<int>(std::floor(x + support));
    lo = std::max(lo, 0);
    hi = std::min(hi, in_dim - 1);
    if (lo > hi) throw std::runtime_error("lanczos: empty tap window (output dimension too small)");
    p.start[j] = lo;
    p.len[j] = hi - lo + 1;
    p.weight_at[j] = p.weights.size();
    double sum = 0.0;
    for (int i = lo; i <= hi; ++i) sum += lanczos3((i - x) * scale);
    for (int i = lo; i <= hi; ++i)
      p.weights.push_back(static_cast<float>(lanczos3((i - x) * scale) / sum));
  }
  return p;
}

}  // namespace

std::array<SensorBandModel, raster::kNumBands> target_band_models(double input_res_m) {
  auto sigma = [&](double gsd) { return gsd / (input_res_m * kFwhmPerSigma); };
  return {SensorBandModel{Band::BLUE, kBlueGsd, sigma(kBlueGsd)},
          SensorBandModel{Band::RED, kBlueGsd, sigma(kBlueGsd)},
          SensorBandModel{Band::NIR, kBlueGsd, sigma(kBlueGsd)},
          SensorBandModel{Band::SWIR, kSwirGsd, sigma(kSwirGsd)}};
}

Grid blend_blue(const Grid& b1, const Grid& b2) {
  if (!b1.same_shape(b2)) throw std::runtime_error("blend_blue: shape mismatch");
  Grid out(b1.h, b1.w);
  for (size_t i = 0; i < out.v.size(); ++i) out.v[i] = 0.25f * b1.v[i] + 0.75f * b2.v[i];
  return out;
}

MultispectralImage select_bands(const std::map<std::string, Grid>& l8_bands) {
  for (const char* need : {"B1", "B2", "B4", "B5", "B6"})
    if (!l8_bands.count(need))
      throw std::runtime_error(std::string("select_bands: missing required band ") + need +
                               (std::string(need) == "B6" ? " (SWIR source)" : ""));
  const Grid& b1 = l8_bands.at("B1");
  for (const char* name : {"B2", "B4", "B5", "B6"})
    if (!l8_bands.at(name).same_shape(b1)) throw std::runtime_error("select_bands: band shapes differ");

  MultispectralImage img(b1.h, b1.w, raster::DomainTag::L8_30M);
  img.band(Band::BLUE) = blend_blue(b1, l8_bands.at("B2"));
  img.band(Band::RED) = l8_bands.at("B4");
  img.band(Band::NIR) = l8_bands.at("B5");
  img.band(Band::SWIR) = l8_bands.at("B6");
  return img;
}

Grid gaussian_filter(const Grid& band, double sigma_px) {
  if (sigma_px <= 0) throw std::runtime_error("gaussian_filter: sigma must be > 0");
  int radius = 0;
  const auto k = gaussian_kernel_1d(sigma_px, radius);
  const int h = band.h, w = band.w;
  Grid tmp(h, w), out(h, w);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      double acc = 0.0;
      for (int t = -radius; t <= radius; ++t)
        acc += k[t + radius] * band.at(r, reflect_index(c + t, w));
      tmp.at(r, c) = static_cast<float>(acc);
    }
  }
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      double acc = 0.0;
      for (int t = -radius; t <= radius; ++t)
        acc += k[t + radius] * tmp.at(reflect_index(r + t, h), c);
      out.at(r, c) = static_cast<float>(acc);
    }
  }
  return out;
}

Grid psf_filter(const Grid& band, const SensorBandModel& model) {
  return gaussian_filter(band, model.sigma_px);
}

Grid subsample3(const Grid& band) {
  if (band.h < 3 || band.w < 3) throw std::runtime_error("subsample3: input smaller than 3x3");
  const int oh = (band.h + 2) / 3, ow = (band.w + 2) / 3;
  Grid out(oh, ow);
  for (int r = 0; r < oh; ++r)
    for (int c = 0; c < ow; ++c) out.at(r, c) = band.at(3 * r, 3 * c);
  return out;
}

Grid lanczos_resample(const Grid& band, double in_res_m, double out_res_m) {
  const double scale = in_res_m / out_res_m;
  const int oh = static_cast<int>(std::lround(band.h * scale));
  const int ow = static_cast<int>(std::lround(band.w * scale));
  if (oh < 1 || ow < 1) throw std::runtime_error("lanczos_resample: output dimension < 1");

  const AxisPlan px = plan_axis(band.w, ow, scale);
  const AxisPlan py = plan_axis(band.h, oh, scale);

  Grid tmp(band.h, ow);
  for (int r = 0; r < band.h; ++r) {
    for (int j = 0; j < ow; ++j) {
      double acc = 0.0;
      const float* wgt = px.weights.data() + px.weight_at[j];
      for (int t = 0; t < px.len[j]; ++t) acc += wgt[t] * band.at(r, px.start[j] + t);
      tmp.at(r, j) = static_cast<float>(acc);
    }
  }
  Grid out(oh, ow);
  for (int j = 0; j < oh; ++j) {
    const float* wgt = py.weights.data() + py.weight_at[j];
    for (int c = 0; c < ow; ++c) {
      double acc = 0.0;
      for (int t = 0; t < py.len[j]; ++t) acc += wgt[t] * tmp.at(py.start[j] + t, c);
      out.at(j, c) = static_cast<float>(acc);
    }
  }
  return out;
}

Grid upscale_band(const Grid& band30, const SensorBandModel& model) {
  return lanczos_resample(subsample3(psf_filter(band30, model)), kRes90, kRes333);
}

UpscaleResult upscale_l8(const std::map<std::string, Grid>& l8_bands,
                         const std::array<SensorBandModel, raster::kNumBands>& models,
                         const raster::ByteGrid* validity30) {
  const MultispectralImage sel = select_bands(l8_bands);
  std::array<Grid, raster::kNumBands> up;
  int oh = 1 << 30, ow = 1 << 30;
  for (int b = 0; b < raster::kNumBands; ++b) {
    up[b] = upscale_band(sel.bands[b], models[b]);
    oh = std::min(oh, up[b].h);
    ow = std::min(ow, up[b].w);
  }

  UpscaleResult res{MultispectralImage(oh, ow, raster::DomainTag::LU_333M)};
  for (int b = 0; b < raster::kNumBands; ++b)
    for (int r = 0; r < oh; ++r)
      for (int c = 0; c < ow; ++c) res.image.bands[b].at(r, c) = up[b].at(r, c);

  if (validity30) {
    // Push an invalid-pixel indicator through the widest chain; any nonzero
    // contribution marks the output pixel invalid.
    Grid ind(validity30->h, validity30->w);
    bool any = false;
    for (size_t i = 0; i < ind.v.size(); ++i) {
      ind.v[i] = validity30->v[i] ? 0.f : 1.f;
      any = any || !validity30->v[i];
    }
    if (any) {
      const Grid spread = upscale_band(ind, models[static_cast<int>(Band::SWIR)]);
      for (int r = 0; r < oh; ++r)
        for (int c = 0; c < ow; ++c)
          if (std::abs(spread.at(r, c)) > 1e-6f) {
            res.image.validity.at(r, c) = 0;
            for (auto& bnd : res.image.bands) bnd.at(r, c) = 0.f;
          }
    }
  }
  return res;
}

CloudMask upscale_labels(const CloudMask& mask30,
                         const std::array<SensorBandModel, raster::kNumBands>& models) {
  const auto& blue = models[static_cast<int>(Band::BLUE)];
  const int h = mask30.height(), w = mask30.width();
  Grid cloudiness(h, w), invalid(h, w);
  bool any_invalid = false;
  for (size_t i = 0; i < cloudiness.v.size(); ++i) {
    const uint8_t l = mask30.labels.v[i];
    cloudiness.v[i] = l == raster::kCloudy ? 1.f : 0.f;
    invalid.v[i] = l == raster::kInvalidLabel ? 1.f : 0.f;
    any_invalid = any_invalid || l == raster::kInvalidLabel;
  }

  const Grid soft = upscale_band(cloudiness, blue);
  CloudMask out(soft.h, soft.w, kRes333);
  for (size_t i = 0; i < soft.v.size(); ++i)
    out.labels.v[i] = soft.v[i] >= 0.5f ? raster::kCloudy : raster::kClear;

  if (any_invalid) {
    const Grid spread = upscale_band(invalid, blue);
    for (size_t i = 0; i < spread.v.size(); ++i)
      if (std::abs(spread.v[i]) > 1e-6f) out.labels.v[i] = raster::kInvalidLabel;
  }
  return out;
}

}  // namespace xsda::harmonize
