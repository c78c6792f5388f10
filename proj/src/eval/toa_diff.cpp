#include "xsda/eval/toa_diff.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace xsda::eval {

namespace {

DiffSummary summarize(std::vector<double>& diffs, int bins, double lo, double hi) {
  DiffSummary s;
  s.hist.assign(bins, 0.0);
  s.n = static_cast<int64_t>(diffs.size());
  if (s.n == 0) return s;
  double sum = 0;
  for (double d : diffs) sum += d;
  s.mean = sum / static_cast<double>(s.n);
  double sum2 = 0;
  for (double d : diffs) sum2 += (d - s.mean) * (d - s.mean);
  s.stddev = std::sqrt(sum2 / static_cast<double>(s.n));
  std::sort(diffs.begin(), diffs.end());
  const std::array<double, 5> ps = {0.05, 0.25, 0.5, 0.75, 0.95};
  for (size_t i = 0; i < ps.size(); ++i) {
    const double pos = ps[i] * (static_cast<double>(s.n) - 1.0);
    const size_t k = static_cast<size_t>(pos);
    const double frac = pos - static_cast<double>(k);
    s.quantiles[i] = k + 1 < diffs.size() ? diffs[k] * (1 - frac) + diffs[k + 1] * frac : diffs.back();
  }
  const double scale = bins / (hi - lo);
  for (double d : diffs) {
    int bin = static_cast<int>((d - lo) * scale);
    s.hist[std::clamp(bin, 0, bins - 1)] += 1.0;
  }
  for (auto& v : s.hist) v /= static_cast<double>(s.n);
  return s;
}

}  // namespace

ToaDiffStats toa_difference_stats(const raster::MultispectralImage& pv,
                                  const raster::MultispectralImage& adapted,
                                  const raster::QualityMask& quality, int bins, double lo,
                                  double hi) {
  if (pv.height() != adapted.height() || pv.width() != adapted.width() ||
      pv.height() != quality.height() || pv.width() != quality.width())
    throw std::runtime_error("toa_difference_stats: shape mismatch");

  ToaDiffStats out;
  out.bins = bins;
  out.lo = lo;
  out.hi = hi;
  for (int b = 0; b < raster::kNumBands; ++b) {
    std::vector<double> good, bad;
    const auto& flag = quality.planes[b];
    for (size_t i = 0; i < pv.bands[b].v.size(); ++i) {
      if (!pv.validity.v[i] || !adapted.validity.v[i]) continue;
      const double d = static_cast<double>(pv.bands[b].v[i]) - adapted.bands[b].v[i];
      (flag.v[i] ? bad : good).push_back(d);
    }
    out.good[b] = summarize(good, bins, lo, hi);
    out.bad[b] = summarize(bad, bins, lo, hi);
  }
  return out;
}

}  // namespace xsda::eval
