#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "xsda/harmonize/upscale.hpp"
#include "xsda/nn/rng.hpp"

using namespace xsda;
using namespace xsda::harmonize;

namespace {

Grid random_grid(int h, int w, nn::Rng& rng, float lo = 0.f, float hi = 1.f) {
  Grid g(h, w);
  for (auto& v : g.v) v = rng.uniformf(lo, hi);
  return g;
}

int reflect(int i, int n) {
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * n - 2 - i;
  }
  return i;
}

// dense 2-D convolution with an explicitly normalized 2-D Gaussian kernel
Grid dense_gaussian_conv(const Grid& in, double sigma) {
  const int radius = std::max(1, static_cast<int>(std::ceil(4.0 * sigma)));
  const int dim = 2 * radius + 1;
  std::vector<double> k(dim * dim);
  double sum = 0;
  for (int i = -radius; i <= radius; ++i)
    for (int j = -radius; j <= radius; ++j) {
      const double v = std::exp(-0.5 * (i * i + j * j) / (sigma * sigma));
      k[(i + radius) * dim + (j + radius)] = v;
      sum += v;
    }
  for (auto& v : k) v /= sum;
  Grid out(in.h, in.w);
  for (int r = 0; r < in.h; ++r)
    for (int c = 0; c < in.w; ++c) {
      double acc = 0;
      for (int i = -radius; i <= radius; ++i)
        for (int j = -radius; j <= radius; ++j)
          acc += k[(i + radius) * dim + (j + radius)] * in.at(reflect(r + i, in.h), reflect(c + j, in.w));
      out.at(r, c) = static_cast<float>(acc);
    }
  return out;
}

double lanczos3_ref(double t) {
  if (t == 0) return 1.0;
  if (std::abs(t) >= 3.0) return 0.0;
  return 3.0 * std::sin(M_PI * t) * std::sin(M_PI * t / 3.0) / (M_PI * t * M_PI * t);
}

// direct 2-D evaluation of the Lanczos sum at every output site
Grid direct_lanczos(const Grid& in, double in_res, double out_res) {
  const double s = in_res / out_res;
  const int oh = static_cast<int>(std::lround(in.h * s)), ow = static_cast<int>(std::lround(in.w * s));
  const double support = 3.0 / s;
  Grid out(oh, ow);
  for (int r = 0; r < oh; ++r)
    for (int c = 0; c < ow; ++c) {
      const double y = (r + 0.5) / s - 0.5, x = (c + 0.5) / s - 0.5;
      double acc = 0, wsum = 0;
      for (int i = std::max(0, (int)std::ceil(y - support)); i <= std::min(in.h - 1, (int)std::floor(y + support)); ++i)
        for (int j = std::max(0, (int)std::ceil(x - support)); j <= std::min(in.w - 1, (int)std::floor(x + support)); ++j) {
          const double w = lanczos3_ref((i - y) * s) * lanczos3_ref((j - x) * s);
          acc += w * in.at(i, j);
          wsum += w;
        }
      out.at(r, c) = static_cast<float>(acc / wsum);
    }
  return out;
}

double max_abs_diff(const Grid& a, const Grid& b) {
  REQUIRE(a.h == b.h);
  REQUIRE(a.w == b.w);
  double m = 0;
  for (size_t i = 0; i < a.v.size(); ++i) m = std::max(m, std::abs(double(a.v[i]) - b.v[i]));
  return m;
}

}  // namespace

TEST_CASE("blend_blue weights 25/75") {
  Grid b1(5, 5, 0.2f), b2(5, 5, 0.4f);
  Grid out = blend_blue(b1, b2);
  for (float v : out.v) CHECK(v == doctest::Approx(0.35f).epsilon(1e-7));

  Grid c1(3, 3, 0.7f), c2(3, 3, 0.7f);
  for (float v : blend_blue(c1, c2).v) CHECK(v == doctest::Approx(0.7f).epsilon(1e-7));

  nn::Rng rng(3);
  Grid r1 = random_grid(9, 9, rng), r2 = random_grid(9, 9, rng);
  Grid rb = blend_blue(r1, r2);
  for (size_t i = 0; i < rb.v.size(); ++i)
    CHECK(rb.v[i] == doctest::Approx(0.25f * r1.v[i] + 0.75f * r2.v[i]).epsilon(1e-6));

  Grid bad(4, 5, 0.f);
  CHECK_THROWS_WITH_AS(blend_blue(b1, bad), doctest::Contains("shape mismatch"), std::runtime_error);
}

TEST_CASE("select_bands wiring and errors") {
  std::map<std::string, Grid> l8;
  const float c[7] = {0.1f, 0.2f, 0.3f, 0.4f, 0.5f, 0.6f, 0.7f};
  for (int i = 0; i < 7; ++i) l8["B" + std::to_string(i + 1)] = Grid(6, 6, c[i]);
  MultispectralImage out = select_bands(l8);
  CHECK(out.height() == 6);
  CHECK(out.band(Band::BLUE).at(0, 0) == doctest::Approx(0.25f * 0.1f + 0.75f * 0.2f));
  CHECK(out.band(Band::RED).at(0, 0) == doctest::Approx(0.4f));
  CHECK(out.band(Band::NIR).at(0, 0) == doctest::Approx(0.5f));
  CHECK(out.band(Band::SWIR).at(0, 0) == doctest::Approx(0.6f));

  l8.erase("B6");
  CHECK_THROWS_WITH_AS(select_bands(l8), doctest::Contains("SWIR"), std::runtime_error);
}

TEST_CASE("band models follow the FWHM = GSD rule") {
  const auto models = target_band_models();
  CHECK(models[0].sigma_px == doctest::Approx((96.9 / 30.0) / kFwhmPerSigma).epsilon(1e-9));
  CHECK(models[0].sigma_px == doctest::Approx(1.3716).epsilon(1e-4));
  // SWIR PSF about twice as wide
  CHECK(models[3].sigma_px / models[0].sigma_px == doctest::Approx(184.7 / 96.9).epsilon(1e-9));
}

TEST_CASE("psf_filter preserves constants and matches dense convolution") {
  const auto models = target_band_models();
  Grid c(20, 20, 0.42f);
  Grid out = psf_filter(c, models[0]);
  for (float v : out.v) CHECK(v == doctest::Approx(0.42f).epsilon(1e-6));

  // unit impulse reproduces the sampled normalized kernel
  Grid imp(31, 31, 0.f);
  imp.at(15, 15) = 1.f;
  Grid resp = psf_filter(imp, models[0]);
  Grid ref = dense_gaussian_conv(imp, models[0].sigma_px);
  CHECK(max_abs_diff(resp, ref) < 1e-6);

  nn::Rng rng(5);
  Grid r = random_grid(24, 24, rng);
  CHECK(max_abs_diff(psf_filter(r, models[3]), dense_gaussian_conv(r, models[3].sigma_px)) < 1e-5);
}

TEST_CASE("subsample3 picks every third pixel") {
  Grid ramp(9, 9);
  for (int r = 0; r < 9; ++r)
    for (int c = 0; c < 9; ++c) ramp.at(r, c) = static_cast<float>(10 * r + c);
  Grid out = subsample3(ramp);
  REQUIRE(out.h == 3);
  REQUIRE(out.w == 3);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) CHECK(out.at(r, c) == 10.f * (3 * r) + 3 * c);

  for (float v : subsample3(Grid(7, 7, 0.3f)).v) CHECK(v == 0.3f);

  nn::Rng rng(7);
  Grid big = random_grid(300, 300, rng);
  Grid sub = subsample3(big);
  REQUIRE(sub.h == 100);
  for (int r = 0; r < sub.h; ++r)
    for (int c = 0; c < sub.w; ++c) CHECK(sub.at(r, c) == big.at(3 * r, 3 * c));
}

TEST_CASE("lanczos_resample shapes, constants, ramps, and the direct-sum oracle") {
  SUBCASE("constant 999x999 -> 270x270") {
    Grid c(999, 999, 0.8f);
    Grid out = lanczos_resample(c, 90.0, 333.0);
    REQUIRE(out.h == 270);
    REQUIRE(out.w == 270);
    for (float v : out.v) CHECK(v == doctest::Approx(0.8f).epsilon(1e-6));
  }
  SUBCASE("linear ramp reproduced away from borders") {
    Grid ramp(111, 111);
    for (int r = 0; r < 111; ++r)
      for (int c = 0; c < 111; ++c) ramp.at(r, c) = 0.005f * c;
    Grid out = lanczos_resample(ramp, 90.0, 333.0);
    REQUIRE(out.w == 30);
    const double s = 90.0 / 333.0;
    for (int r = 10; r < out.h - 10; ++r)
      for (int c = 10; c < out.w - 10; ++c) {
        const double x_in = (c + 0.5) / s - 0.5;
        CHECK(out.at(r, c) == doctest::Approx(0.005 * x_in).epsilon(1e-3));
      }
  }
  SUBCASE("matches brute-force direct evaluation") {
    nn::Rng rng(9);
    Grid r = random_grid(52, 41, rng);
    CHECK(max_abs_diff(lanczos_resample(r, 90.0, 333.0), direct_lanczos(r, 90.0, 333.0)) < 1e-5);
  }
}

TEST_CASE("upscale_band equals the manual chain and the full chain shape law") {
  const auto models = target_band_models();
  nn::Rng rng(11);
  Grid in = random_grid(120, 96, rng);
  Grid manual = lanczos_resample(subsample3(psf_filter(in, models[1])), 90.0, 333.0);
  CHECK(max_abs_diff(upscale_band(in, models[1]), manual) == 0.0);

  // 333x333 @30m -> 111x111 @90m -> 30x30 @333m
  CHECK(upscale_band(random_grid(333, 333, rng), models[0]).h == 30);
}

TEST_CASE("upscale chain is linear and preserves band ordering of constants") {
  const auto models = target_band_models();
  nn::Rng rng(13);
  Grid x = random_grid(60, 60, rng), y = random_grid(60, 60, rng);
  const float a = 0.7f, b = -0.3f;
  Grid mix(60, 60);
  for (size_t i = 0; i < mix.v.size(); ++i) mix.v[i] = a * x.v[i] + b * y.v[i];
  Grid lhs = upscale_band(mix, models[0]);
  Grid ux = upscale_band(x, models[0]), uy = upscale_band(y, models[0]);
  for (size_t i = 0; i < lhs.v.size(); ++i)
    CHECK(lhs.v[i] == doctest::Approx(a * ux.v[i] + b * uy.v[i]).epsilon(5e-5));

  std::map<std::string, Grid> l8;
  l8["B1"] = Grid(60, 60, 0.10f);
  l8["B2"] = Grid(60, 60, 0.10f);
  l8["B4"] = Grid(60, 60, 0.35f);
  l8["B5"] = Grid(60, 60, 0.60f);
  l8["B6"] = Grid(60, 60, 0.20f);
  auto res = upscale_l8(l8, models);
  const auto& img = res.image;
  CHECK(img.band(Band::BLUE).at(2, 2) == doctest::Approx(0.10f).epsilon(1e-5));
  CHECK(img.band(Band::BLUE).at(2, 2) < img.band(Band::SWIR).at(2, 2));
  CHECK(img.band(Band::SWIR).at(2, 2) < img.band(Band::RED).at(2, 2));
  CHECK(img.band(Band::RED).at(2, 2) < img.band(Band::NIR).at(2, 2));
  CHECK(img.domain_tag == raster::DomainTag::LU_333M);
}

TEST_CASE("label upscaling thresholds the float chain") {
  const auto models = target_band_models();
  SUBCASE("all cloudy stays cloudy, all clear stays clear") {
    CloudMask cloudy(60, 60, 30.0, raster::kCloudy);
    for (uint8_t v : upscale_labels(cloudy, models).labels.v) CHECK(v == raster::kCloudy);
    CloudMask clear(60, 60, 30.0, raster::kClear);
    for (uint8_t v : upscale_labels(clear, models).labels.v) CHECK(v == raster::kClear);
  }
  SUBCASE("half-plane edge equals explicit float chain then threshold") {
    CloudMask half(66, 66, 30.0);
    for (int r = 0; r < 66; ++r)
      for (int c = 0; c < 66; ++c) half.labels.at(r, c) = c >= 33 ? raster::kCloudy : raster::kClear;
    CloudMask got = upscale_labels(half, models);

    Grid f(66, 66);
    for (size_t i = 0; i < f.v.size(); ++i) f.v[i] = half.labels.v[i] ? 1.f : 0.f;
    Grid soft = upscale_band(f, models[0]);
    REQUIRE(soft.h == got.height());
    bool saw_cloud = false, saw_clear = false;
    for (size_t i = 0; i < soft.v.size(); ++i) {
      CHECK(got.labels.v[i] == (soft.v[i] >= 0.5f ? raster::kCloudy : raster::kClear));
      saw_cloud = saw_cloud || got.labels.v[i] == raster::kCloudy;
      saw_clear = saw_clear || got.labels.v[i] == raster::kClear;
    }
    CHECK(saw_cloud);
    CHECK(saw_clear);
  }
  SUBCASE("invalid labels propagate") {
    CloudMask m(60, 60, 30.0, raster::kClear);
    m.labels.at(30, 30) = raster::kInvalidLabel;
    CloudMask up = upscale_labels(m, models);
    bool any_invalid = false;
    for (uint8_t v : up.labels.v) any_invalid = any_invalid || v == raster::kInvalidLabel;
    CHECK(any_invalid);
  }
}
