#pragma once

#include <array>
#include <vector>

#include "xsda/raster/patches.hpp"

namespace xsda::eval {

/// Magnitudes |X_k| of the unnormalized 2-D DFT, row-major, unshifted.
/// Radix-2 FFT per axis for power-of-two dims, direct DFT otherwise.
std::vector<double> dft2d_magnitude(const float* data, int h, int w);

/// Per-band amplitude spectrum in dB (20*log10(|X| + eps)) of square patches,
/// converted per patch and averaged across patches, DC-centered.
struct SpectrumSet {
  int size = 0;
  int64_t n_patches = 0;
  std::array<std::vector<double>, raster::kNumBands> db;
};

SpectrumSet fft_amplitude_db(const raster::PatchSet& patches, double eps = 1e-12);

}  // namespace xsda::eval
