#include "xsda/da/histmatch.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace xsda::da {

namespace {

float sorted_quantile(const std::vector<float>& sorted, double p) {
  const double pos = p * (static_cast<double>(sorted.size()) - 1.0);
  const size_t lo = static_cast<size_t>(pos);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = pos - static_cast<double>(lo);
  return static_cast<float>(sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac);
}

HistogramMatchModel fit_from_pools(std::array<std::vector<float>, raster::kNumBands>& pv_px,
                                   std::array<std::vector<float>, raster::kNumBands>& lu_px,
                                   int n_quantiles) {
  if (n_quantiles < 2) throw std::runtime_error("n_quantiles must be >= 2");
  HistogramMatchModel m;
  m.n_quantiles = n_quantiles;
  for (int b = 0; b < raster::kNumBands; ++b) {
    auto& src = pv_px[b];
    auto& dst = lu_px[b];
    if (src.empty() || dst.empty()) throw std::runtime_error("empty pool in histogram_match_fit");
    std::sort(src.begin(), src.end());
    std::sort(dst.begin(), dst.end());
    if (src.front() == src.back()) {
      m.degenerate[b] = true;
      m.src_q[b] = {src.front(), src.front()};
      m.dst_q[b] = {src.front(), src.front()};
      continue;
    }
    m.src_q[b].resize(n_quantiles);
    m.dst_q[b].resize(n_quantiles);
    for (int k = 0; k < n_quantiles; ++k) {
      const double p = static_cast<double>(k) / (n_quantiles - 1);
      m.src_q[b][k] = sorted_quantile(src, p);
      m.dst_q[b][k] = sorted_quantile(dst, p);
    }
  }
  return m;
}

}  // namespace

float HistogramMatchModel::apply_value(int band, float v) const {
  if (degenerate[band]) return v;
  const auto& sq = src_q[band];
  const auto& dq = dst_q[band];
  if (v <= sq.front()) return dq.front();
  if (v >= sq.back()) return dq.back();
  const auto it = std::upper_bound(sq.begin(), sq.end(), v);
  const size_t i = static_cast<size_t>(it - sq.begin());  // sq[i-1] <= v < sq[i]
  const float lo = sq[i - 1], hi = sq[i];
  if (hi <= lo) return dq[i];
  const float t = (v - lo) / (hi - lo);
  return dq[i - 1] + t * (dq[i] - dq[i - 1]);
}

nlohmann::json HistogramMatchModel::to_json() const {
  nlohmann::json j{{"n_quantiles", n_quantiles}};
  for (int b = 0; b < raster::kNumBands; ++b) {
    const auto name = raster::kBandNames[b];
    j["bands"][name] = {{"src", src_q[b]}, {"dst", dst_q[b]}, {"degenerate", degenerate[b]}};
  }
  return j;
}

HistogramMatchModel HistogramMatchModel::from_json(const nlohmann::json& j) {
  HistogramMatchModel m;
  m.n_quantiles = j.at("n_quantiles").get<int>();
  for (int b = 0; b < raster::kNumBands; ++b) {
    const auto& jb = j.at("bands").at(raster::kBandNames[b]);
    m.src_q[b] = jb.at("src").get<std::vector<float>>();
    m.dst_q[b] = jb.at("dst").get<std::vector<float>>();
    m.degenerate[b] = jb.at("degenerate").get<bool>();
  }
  return m;
}

HistogramMatchModel histogram_match_fit(const raster::PatchSet& pv_pool,
                                        const raster::PatchSet& lu_pool, int n_quantiles) {
  std::array<std::vector<float>, raster::kNumBands> pv_px, lu_px;
  auto gather = [](const raster::PatchSet& pool, auto& px) {
    const int64_t per = static_cast<int64_t>(pool.patch_size) * pool.patch_size;
    for (int64_t i = 0; i < pool.count(); ++i) {
      const float* p = pool.patch(i);
      for (int b = 0; b < raster::kNumBands; ++b)
        px[b].insert(px[b].end(), p + b * per, p + (b + 1) * per);
    }
  };
  gather(pv_pool, pv_px);
  gather(lu_pool, lu_px);
  return fit_from_pools(pv_px, lu_px, n_quantiles);
}

HistogramMatchModel histogram_match_fit_images(
    const std::vector<const raster::MultispectralImage*>& pv,
    const std::vector<const raster::MultispectralImage*>& lu, int n_quantiles) {
  std::array<std::vector<float>, raster::kNumBands> pv_px, lu_px;
  auto gather = [](const std::vector<const raster::MultispectralImage*>& imgs, auto& px) {
    for (const auto* img : imgs)
      for (int b = 0; b < raster::kNumBands; ++b)
        for (size_t i = 0; i < img->bands[b].v.size(); ++i)
          if (img->validity.v[i]) px[b].push_back(img->bands[b].v[i]);
  };
  gather(pv, pv_px);
  gather(lu, lu_px);
  return fit_from_pools(pv_px, lu_px, n_quantiles);
}

raster::MultispectralImage histogram_match_apply(const raster::MultispectralImage& image,
                                                 const HistogramMatchModel& model) {
  raster::MultispectralImage out = image;
  for (int b = 0; b < raster::kNumBands; ++b)
    for (size_t i = 0; i < out.bands[b].v.size(); ++i)
      if (out.validity.v[i]) out.bands[b].v[i] = model.apply_value(b, out.bands[b].v[i]);
  return out;
}

}  // namespace xsda::da
