#include "xsda/eval/spectra.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace xsda::eval {

namespace {

using cplx = std::complex<double>;

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

// in-place iterative radix-2 Cooley-Tukey
void fft_pow2(std::vector<cplx>& a) {
  const size_t n = a.size();
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * M_PI / static_cast<double>(len);
    const cplx wl(std::cos(ang), std::sin(ang));
    for (size_t i = 0; i < n; i += len) {
      cplx w(1.0);
      for (size_t k = 0; k < len / 2; ++k) {
        const cplx u = a[i + k], v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

void dft_direct(std::vector<cplx>& a) {
  const size_t n = a.size();
  std::vector<cplx> out(n);
  for (size_t k = 0; k < n; ++k) {
    cplx acc(0.0);
    for (size_t t = 0; t < n; ++t)
      acc += a[t] * std::polar(1.0, -2.0 * M_PI * static_cast<double>(k * t) / static_cast<double>(n));
    out[k] = acc;
  }
  a = std::move(out);
}

void fft_axis(std::vector<cplx>& a) {
  if (is_pow2(static_cast<int>(a.size())))
    fft_pow2(a);
  else
    dft_direct(a);
}

}  // namespace

std::vector<double> dft2d_magnitude(const float* data, int h, int w) {
  std::vector<std::vector<cplx>> rows(h, std::vector<cplx>(w));
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) rows[r][c] = cplx(data[r * w + c], 0.0);
    fft_axis(rows[r]);
  }
  std::vector<double> mag(static_cast<size_t>(h) * w);
  std::vector<cplx> col(h);
  for (int c = 0; c < w; ++c) {
    for (int r = 0; r < h; ++r) col[r] = rows[r][c];
    fft_axis(col);
    for (int r = 0; r < h; ++r) mag[static_cast<size_t>(r) * w + c] = std::abs(col[r]);
  }
  return mag;
}

SpectrumSet fft_amplitude_db(const raster::PatchSet& patches, double eps) {
  if (patches.count() == 0) throw std::runtime_error("fft_amplitude_db: empty patch set");
  const int s = patches.patch_size;
  SpectrumSet out;
  out.size = s;
  out.n_patches = patches.count();
  for (auto& d : out.db) d.assign(static_cast<size_t>(s) * s, 0.0);

  for (int64_t i = 0; i < patches.count(); ++i) {
    const float* p = patches.patch(i);
    for (int b = 0; b < raster::kNumBands; ++b) {
      const auto mag = dft2d_magnitude(p + static_cast<int64_t>(b) * s * s, s, s);
      for (size_t k = 0; k < mag.size(); ++k) out.db[b][k] += 20.0 * std::log10(mag[k] + eps);
    }
  }
  // average over patches, then center DC
  for (int b = 0; b < raster::kNumBands; ++b) {
    for (auto& v : out.db[b]) v /= static_cast<double>(out.n_patches);
    std::vector<double> shifted(out.db[b].size());
    for (int r = 0; r < s; ++r)
      for (int c = 0; c < s; ++c)
        shifted[static_cast<size_t>((r + s / 2) % s) * s + (c + s / 2) % s] =
            out.db[b][static_cast<size_t>(r) * s + c];
    out.db[b] = std::move(shifted);
  }
  return out;
}

}  // namespace xsda::eval
