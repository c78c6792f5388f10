#pragma once

#include <optional>

#include "xsda/raster/image.hpp"

namespace xsda::cloud {

struct StratumStats {
  int64_t n = 0;
  int64_t correct = 0;
  double accuracy_pct = 0;  // over this stratum
  double share = 0;         // of all valid pixels
};

/// Overall percent accuracy over valid pixels (label 255 in either mask is
/// excluded), optionally stratified into good/bad radiometric-quality subsets
/// (bad = any band flagged). Counts are kept so recombination identities are
/// exact in integer arithmetic.
struct AccuracyStats {
  int64_t n_valid = 0;
  int64_t n_correct = 0;
  double overall_pct = 0;
  std::optional<StratumStats> good, bad;
};

AccuracyStats accuracy(const raster::CloudMask& pred, const raster::CloudMask& truth,
                       const raster::QualityMask* strata = nullptr);

}  // namespace xsda::cloud
