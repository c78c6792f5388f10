#include "xsda/cloud/metrics.hpp"

#include <stdexcept>

namespace xsda::cloud {

AccuracyStats accuracy(const raster::CloudMask& pred, const raster::CloudMask& truth,
                       const raster::QualityMask* strata) {
  if (pred.height() != truth.height() || pred.width() != truth.width())
    throw std::runtime_error("accuracy: mask shapes differ");
  if (strata && (strata->height() != truth.height() || strata->width() != truth.width()))
    throw std::runtime_error("accuracy: quality mask shape differs");

  AccuracyStats out;
  StratumStats good, bad;
  for (int r = 0; r < truth.height(); ++r)
    for (int c = 0; c < truth.width(); ++c) {
      const uint8_t p = pred.labels.at(r, c);
      const uint8_t t = truth.labels.at(r, c);
      if (p == raster::kInvalidLabel || t == raster::kInvalidLabel) continue;
      const bool ok = p == t;
      ++out.n_valid;
      out.n_correct += ok;
      if (strata) {
        StratumStats& s = strata->any_bad(r, c) ? bad : good;
        ++s.n;
        s.correct += ok;
      }
    }
  if (out.n_valid == 0) throw std::runtime_error("accuracy: empty valid set");
  out.overall_pct = 100.0 * static_cast<double>(out.n_correct) / static_cast<double>(out.n_valid);
  if (strata) {
    auto finish = [&](StratumStats& s) {
      s.share = static_cast<double>(s.n) / static_cast<double>(out.n_valid);
      s.accuracy_pct = s.n ? 100.0 * static_cast<double>(s.correct) / static_cast<double>(s.n) : 0.0;
    };
    finish(good);
    finish(bad);
    out.good = good;
    out.bad = bad;
  }
  return out;
}

}  // namespace xsda::cloud
