#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <filesystem>

#include "helpers.hpp"
#include "xsda/models/checkpoint.hpp"
#include "xsda/models/zoo.hpp"

using namespace xsda;
using namespace xsda::nn;
using namespace xsda::models;
using xsda::test::random_tensor;

TEST_CASE("generator preserves shape and starts as the exact identity") {
  Rng rng(42);
  GeneratorNet g(rng);
  NoGradGuard ng;

  Var x = constant(random_tensor({1, 4, 64, 64}, rng, 0.f, 1.f));
  Var y = g.forward(x, false);
  REQUIRE(y.shape() == Shape{1, 4, 64, 64});
  for (int64_t i = 0; i < x.numel(); ++i) CHECK(y.val().ptr()[i] == x.val().ptr()[i]);

  // fully convolutional: ragged sizes map through unchanged
  Var x2 = constant(random_tensor({1, 4, 33, 47}, rng, 0.f, 1.f));
  CHECK(g.forward(x2, false).shape() == Shape{1, 4, 33, 47});

  // identity also holds in training mode (batch-norm path is bypassed by the
  // zero-initialized final projection)
  Var x3 = constant(random_tensor({2, 4, 16, 16}, rng, 0.f, 1.f));
  Var y3 = g.forward(x3, true);
  for (int64_t i = 0; i < x3.numel(); ++i) CHECK(y3.val().ptr()[i] == x3.val().ptr()[i]);
}

TEST_CASE("generator is shift covariant in the interior") {
  Rng rng(7);
  GeneratorNet g(rng);
  // give it non-identity behavior
  for (auto& [name, p] : g.param_list().params)
    if (name == "final.w")
      for (int64_t i = 0; i < p.numel(); ++i) p.node()->value.ptr()[i] = rng.uniformf(-0.2f, 0.2f);
  NoGradGuard ng;

  Tensor big = random_tensor({1, 4, 48, 48}, rng, 0.f, 1.f);
  const int dr = 5, dc = 8, S = 32;
  auto crop = [&](int r0, int c0) {
    Tensor t({1, 4, S, S});
    for (int c = 0; c < 4; ++c)
      for (int r = 0; r < S; ++r)
        std::memcpy(t.ptr() + (c * S + r) * S, big.ptr() + (c * 48 + r0 + r) * 48 + c0,
                    S * sizeof(float));
    return t;
  };
  Var y1 = g.forward(constant(crop(0, 0)), false);
  Var y2 = g.forward(constant(crop(dr, dc)), false);
  // y1[r+dr, c+dc] == y2[r, c] in the interior (margin > receptive field)
  const int m = 10;
  for (int c = 0; c < 4; ++c)
    for (int r = m; r < S - m - dr; ++r)
      for (int k = m; k < S - m - dc; ++k) {
        const float a = y1.val().ptr()[(c * S + r + dr) * S + k + dc];
        const float b = y2.val().ptr()[(c * S + r) * S + k];
        CHECK(std::abs(a - b) < 1e-4f);
      }
}

TEST_CASE("discriminator output map is ceil(H/16) x ceil(W/16) in (0,1)") {
  Rng rng(43);
  DiscriminatorNet d(rng);
  NoGradGuard ng;

  Var y = d.forward(constant(random_tensor({2, 4, 64, 64}, rng)), false);
  REQUIRE(y.shape() == Shape{2, 1, 4, 4});
  for (int64_t i = 0; i < y.numel(); ++i) {
    CHECK(y.val().ptr()[i] > 0.f);
    CHECK(y.val().ptr()[i] < 1.f);
  }

  Var y2 = d.forward(constant(random_tensor({1, 4, 100, 49}, rng)), false);
  CHECK(y2.shape() == Shape{1, 1, 7, 4});  // ceil(100/16)=7, ceil(49/16)=4

  CHECK_THROWS_WITH_AS(d.forward(constant(random_tensor({1, 4, 8, 8}, rng)), false),
                       doctest::Contains("smaller than 16"), std::runtime_error);
}

TEST_CASE("discriminator filter progression is 8,16,32,64") {
  const NetworkSpec spec = discriminator_spec();
  std::vector<int> filters;
  for (const auto& l : spec.layers)
    if (l.op == "conv" && l.k == 4) filters.push_back(l.out_c);
  CHECK(filters == std::vector<int>{8, 16, 32, 64});
  for (size_t i = 1; i < filters.size(); ++i) CHECK(filters[i] == 2 * filters[i - 1]);
}

TEST_CASE("parameter counts") {
  Rng rng(44);
  SUBCASE("a single 1x1 conv 4->4 with bias has 20 parameters") {
    Conv2d c(4, 4, 1, 1, 1, rng);
    CHECK(c.n_params() == 20);
  }
  SUBCASE("generator matches the closed form from its layer list") {
    GeneratorNet g(rng);
    // sep(4->64): 4*9 + (4*64+64); 3 x sep(64->64): 64*9 + (64*64+64);
    // final 1x1: 64*4+4; batch norm: 4 layers * 64 * 2
    const int64_t expect = (36 + 320) + 3 * (576 + 4160) + 260 + 4 * 128;
    CHECK(count_params(g.param_list()) == expect);
    CHECK(expect == 15336);
  }
  SUBCASE("cloud U-Net parameter count is within 5% of 96k") {
    CloudUNet u(rng);
    const int64_t n = count_params(u.param_list());
    CHECK(std::abs(static_cast<double>(n) - 96000.0) / 96000.0 < 0.05);
    CHECK(n == 95941);
  }
}

TEST_CASE("cloud U-Net forward contract") {
  Rng rng(45);
  CloudUNet u(rng);
  NoGradGuard ng;

  // batch-norm active so the head sees normalized activations
  Var y = u.forward(constant(random_tensor({2, 4, 32, 32}, rng, 0.f, 1.f)), true);
  REQUIRE(y.shape() == Shape{2, 1, 32, 32});
  for (int64_t i = 0; i < y.numel(); ++i) {
    CHECK(y.val().ptr()[i] > 0.f);
    CHECK(y.val().ptr()[i] < 1.f);
  }

  CHECK_THROWS_WITH_AS(u.forward(constant(random_tensor({1, 4, 30, 32}, rng)), false),
                       doctest::Contains("divisible by 4"), std::runtime_error);

  // constant input: near-constant probabilities once the receptive field
  // (about 50 px across) clears the borders
  Var yc = u.forward(constant(Tensor::full({1, 4, 96, 96}, 0.4f)), false);
  float mn = 1.f, mx = 0.f;
  for (int r = 40; r < 56; ++r)
    for (int c = 40; c < 56; ++c) {
      const float v = yc.val().ptr()[r * 96 + c];
      mn = std::min(mn, v);
      mx = std::max(mx, v);
    }
  CHECK(mx - mn < 1e-4f);
}

TEST_CASE("checkpoint save/load/forward is bit-identical") {
  const auto dir = std::filesystem::temp_directory_path() / "xsda_ckpt_test";
  std::filesystem::remove_all(dir);

  Rng rng(46);
  GeneratorNet g(rng);
  // perturb so the net is not the identity
  auto pl = g.param_list();
  for (auto& [name, p] : pl.params)
    for (int64_t i = 0; i < p.numel(); ++i) p.node()->value.ptr()[i] += rng.uniformf(-0.05f, 0.05f);

  CheckpointMeta meta{"GENERATOR", generator_spec().hash(), 123, 46, {}, 1};
  save_checkpoint(dir.string(), "g", meta, pl);

  Rng rng2(99);
  GeneratorNet g2(rng2);
  auto pl2 = g2.param_list();
  const CheckpointMeta back = load_checkpoint(dir.string(), "g", generator_spec().hash(), pl2);
  CHECK(back.step == 123);
  CHECK(back.seed == 46);

  NoGradGuard ng;
  Rng rngx(5);
  Var x = constant(random_tensor({1, 4, 24, 24}, rngx, 0.f, 1.f));
  Var y1 = g.forward(x, false);
  Var y2 = g2.forward(x, false);
  CHECK(std::memcmp(y1.val().ptr(), y2.val().ptr(), y1.numel() * 4) == 0);

  // wrong-kind load is rejected via the spec hash
  CHECK_THROWS_WITH_AS(load_checkpoint(dir.string(), "g", cloud_unet_spec().hash(), pl2),
                       doctest::Contains("hash mismatch"), std::runtime_error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("network specs are structurally stable") {
  CHECK(generator_spec() == generator_spec());
  CHECK(generator_spec().hash() != discriminator_spec().hash());
  CHECK(generator_spec().layers.size() == 5);
  // two dilated layers in the generator
  int dilated = 0;
  for (const auto& l : generator_spec().layers) dilated += l.dilation == 2;
  CHECK(dilated == 2);
}
