#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "xsda/nn/rng.hpp"
#include "xsda/raster/geotiff.hpp"
#include "xsda/raster/patches.hpp"

using namespace xsda;
using namespace xsda::raster;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("xsda_test_" + std::to_string(::getpid()) + "_" + std::to_string(rand()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

MultispectralImage random_image(int h, int w, nn::Rng& rng, DomainTag tag = DomainTag::PV_333M) {
  MultispectralImage img(h, w, tag);
  for (auto& b : img.bands)
    for (auto& v : b.v) v = rng.uniformf(0.f, 1.2f);
  return img;
}

}  // namespace

TEST_CASE("save/load round trip preserves values within float32") {
  TempDir td;
  nn::Rng rng(3);
  MultispectralImage img = random_image(37, 53, rng);
  img.geo = GeoTransform{100.0, 200.0, 333.0, -333.0};
  save_image(img, td.file("a.tif"));
  MultispectralImage back = load_image(td.file("a.tif"), kDefaultBandOrder);
  for (int b = 0; b < kNumBands; ++b)
    for (size_t i = 0; i < img.bands[b].v.size(); ++i)
      CHECK(back.bands[b].v[i] == img.bands[b].v[i]);  // float32 in, float32 out
  REQUIRE(back.geo.has_value());
  CHECK(back.geo->x0 == 100.0);
  CHECK(back.geo->px == 333.0);
}

TEST_CASE("constant image writes constant bands") {
  TempDir td;
  MultispectralImage img(8, 8, DomainTag::LU_333M);
  for (int b = 0; b < kNumBands; ++b)
    for (auto& v : img.bands[b].v) v = 0.25f * (b + 1);
  save_image(img, td.file("c.tif"));
  std::vector<Grid> bands;
  read_geotiff(td.file("c.tif"), bands);
  REQUIRE(bands.size() == 4);
  for (int b = 0; b < 4; ++b) {
    auto [mn, mx] = std::minmax_element(bands[b].v.begin(), bands[b].v.end());
    CHECK(*mn == 0.25f * (b + 1));
    CHECK(*mx == 0.25f * (b + 1));
  }
}

TEST_CASE("nodata pixels round trip through the validity mask") {
  TempDir td;
  nn::Rng rng(5);
  MultispectralImage img = random_image(16, 16, rng);
  img.validity.at(3, 4) = 0;
  img.validity.at(15, 0) = 0;
  for (auto& b : img.bands) {
    b.at(3, 4) = 0.f;
    b.at(15, 0) = 0.f;
  }
  save_image(img, td.file("n.tif"));

  std::vector<Grid> raw;
  const TiffInfo info = read_geotiff(td.file("n.tif"), raw);
  REQUIRE(info.nodata.has_value());
  CHECK(raw[0].at(3, 4) == static_cast<float>(kDefaultNodata));

  MultispectralImage back = load_image(td.file("n.tif"), kDefaultBandOrder);
  CHECK(back.validity.at(3, 4) == 0);
  CHECK(back.validity.at(15, 0) == 0);
  CHECK(back.validity.at(0, 0) == 1);
  CHECK(back.bands[0].at(3, 4) == 0.f);  // nodata never leaks into band values
}

TEST_CASE("band count mismatch is reported") {
  TempDir td;
  Grid g(4, 4, 1.f);
  write_geotiff_f32(td.file("three.tif"), {&g, &g, &g}, {}, {});
  CHECK_THROWS_WITH_AS(load_image(td.file("three.tif"), kDefaultBandOrder),
                       doctest::Contains("band count mismatch"), std::runtime_error);
  CHECK_THROWS_WITH_AS(load_image(td.file("missing.tif"), kDefaultBandOrder),
                       doctest::Contains("missing file"), std::runtime_error);
}

TEST_CASE("band order remaps file bands to roles") {
  TempDir td;
  Grid b0(4, 4, 0.1f), b1(4, 4, 0.2f), b2(4, 4, 0.3f), b3(4, 4, 0.4f);
  write_geotiff_f32(td.file("o.tif"), {&b0, &b1, &b2, &b3}, {}, {});
  MultispectralImage img = load_image(td.file("o.tif"), {"SWIR", "NIR", "RED", "BLUE"});
  CHECK(img.band(Band::BLUE).at(0, 0) == 0.4f);
  CHECK(img.band(Band::SWIR).at(0, 0) == 0.1f);
}

TEST_CASE("cloud and quality masks round trip") {
  TempDir td;
  CloudMask m(6, 7, 333.0);
  m.labels.at(0, 0) = kCloudy;
  m.labels.at(5, 6) = kInvalidLabel;
  save_cloud_mask(m, td.file("m.tif"));
  CloudMask back = load_cloud_mask(td.file("m.tif"));
  CHECK(back.labels.at(0, 0) == kCloudy);
  CHECK(back.labels.at(5, 6) == kInvalidLabel);
  CHECK(back.labels.at(2, 2) == kClear);

  QualityMask q(6, 7);
  q.plane(Band::BLUE).at(1, 2) = 1;
  save_quality_mask(q, td.file("q.tif"));
  QualityMask qb = load_quality_mask(td.file("q.tif"));
  CHECK(qb.plane(Band::BLUE).at(1, 2) == 1);
  CHECK(qb.plane(Band::RED).at(1, 2) == 0);
  CHECK(qb.any_bad(1, 2));
}

TEST_CASE("patch tiling offsets and counts") {
  nn::Rng rng(7);
  SUBCASE("128x128 size 64 stride 64 gives 4 patches at {0,64}^2") {
    auto set = extract_patches(random_image(128, 128, rng), 64, 64);
    REQUIRE(set.count() == 4);
    CHECK(set.prov[0].row == 0);
    CHECK(set.prov[1].col == 64);
    CHECK(set.prov[3].row == 64);
    CHECK(set.prov[3].col == 64);
  }
  SUBCASE("100x100 size 64 stride 64 clamps the second offset to 36") {
    auto set = extract_patches(random_image(100, 100, rng), 64, 64);
    REQUIRE(set.count() == 4);
    CHECK(set.prov[1].col == 36);
    CHECK(set.prov[2].row == 36);
  }
  SUBCASE("64x64 size 64 stride 1 gives exactly one patch") {
    auto set = extract_patches(random_image(64, 64, rng), 64, 1);
    CHECK(set.count() == 1);
  }
  SUBCASE("oversized patch throws") {
    CHECK_THROWS(extract_patches(random_image(32, 32, rng), 64, 64));
  }
}

TEST_CASE("patch count matches the closed form for random shapes") {
  nn::Rng rng(11);
  for (int trial = 0; trial < 25; ++trial) {
    const int h = 8 + static_cast<int>(rng.uniform_int(40));
    const int w = 8 + static_cast<int>(rng.uniform_int(40));
    const int size = 2 + static_cast<int>(rng.uniform_int(std::min(h, w) - 2));
    const int stride = 1 + static_cast<int>(rng.uniform_int(size));
    auto set = extract_patches(random_image(h, w, rng), size, stride);
    auto expected = [&](int dim) {
      return static_cast<int64_t>(std::ceil(static_cast<double>(dim - size) / stride)) + 1;
    };
    CHECK(set.count() == expected(h) * expected(w));
  }
}

TEST_CASE("pasting patches back reconstructs the covered region") {
  nn::Rng rng(13);
  MultispectralImage img = random_image(50, 41, rng);
  auto set = extract_patches(img, 16, 11);
  MultispectralImage rebuilt(50, 41, DomainTag::PV_333M);
  for (int64_t i = 0; i < set.count(); ++i) paste_patch(set, i, rebuilt);
  for (int b = 0; b < kNumBands; ++b)
    for (size_t i = 0; i < img.bands[b].v.size(); ++i)
      CHECK(rebuilt.bands[b].v[i] == img.bands[b].v[i]);  // full coverage, exact values
}

TEST_CASE("labeled patches stay aligned with their pixels") {
  nn::Rng rng(17);
  MultispectralImage img = random_image(40, 40, rng);
  CloudMask mask(40, 40, 333.0);
  for (int r = 0; r < 40; ++r)
    for (int c = 0; c < 40; ++c) mask.labels.at(r, c) = (r + c) % 2;
  auto set = extract_patches(img, 8, 8, &mask);
  REQUIRE(set.labeled());
  for (int64_t i = 0; i < set.count(); ++i) {
    const auto& p = set.prov[i];
    CHECK(set.label(i)[0] == mask.labels.at(p.row, p.col));
    CHECK(set.label(i)[9] == mask.labels.at(p.row + 1, p.col + 1));
  }
}
