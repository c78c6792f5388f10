#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"
#include "xsda/nn/layers.hpp"

using namespace xsda;
using namespace xsda::nn;
using xsda::test::grad_check;
using xsda::test::random_tensor;
using xsda::test::sq_err;

namespace {

// pairs (a, b) with |a - b| bounded away from zero, for kinked ops
std::pair<Var, Var> offset_pair(Rng& rng, Shape s) {
  Tensor a = random_tensor(s, rng, 0.2f, 1.5f);
  Tensor b(a.shape);
  for (int64_t i = 0; i < a.numel(); ++i) b.ptr()[i] = a.ptr()[i] + (i % 2 ? 0.5f : -0.5f);
  return {Var::leaf(a, true), Var::leaf(b, true)};
}

}  // namespace

TEST_CASE("smooth elementwise primitives match finite differences") {
  Rng rng(7);
  Var a = Var::leaf(random_tensor({3, 4}, rng, 0.2f, 1.5f), true);
  Var b = Var::leaf(random_tensor({3, 4}, rng, 0.2f, 1.5f), true);
  Var t = constant(random_tensor({3, 4}, rng));

  auto check = [&](const std::function<Var()>& fn) { CHECK(grad_check(fn, {a, b}) < 1e-3); };
  check([&] { return sq_err(mul(add(a, b), sub(a, b)), t); });
  check([&] { return sq_err(sigmoid(sub(a, b)), t); });
  check([&] { return sq_err(log_(add_scalar(mul(a, a), 0.5f)), t); });
  check([&] { return sq_err(reciprocal(add_scalar(mul(a, a), 1.f)), t); });
  check([&] { return sq_err(sqrt_(add_scalar(mul(a, b), 3.f)), t); });
  check([&] { return sq_err(scale(neg(a), 1.7f), t); });
}

TEST_CASE("kinked elementwise primitives away from their kinks") {
  Rng rng(9);
  auto [a, b] = offset_pair(rng, {4, 4});
  Var t = constant(random_tensor({4, 4}, rng));
  CHECK(grad_check([&, a = a, b = b] { return sq_err(relu(sub(a, b)), t); }, {a, b}) < 1e-3);
  CHECK(grad_check([&, a = a, b = b] { return sq_err(leaky_relu(sub(a, b), 0.2f), t); }, {a, b}) < 1e-3);
  CHECK(grad_check([&, a = a, b = b] { return sq_err(abs_(sub(a, b)), t); }, {a, b}) < 1e-3);

  // clamp with all inputs at least 2h away from both cut points
  Tensor c(Shape{6});
  const float vals[6] = {0.1f, 0.3f, 0.62f, 0.9f, 1.31f, 1.6f};
  for (int i = 0; i < 6; ++i) c.ptr()[i] = vals[i];
  Var cv = Var::leaf(c, true);
  Var tc = constant(random_tensor({6}, rng));
  CHECK(grad_check([&] { return sq_err(clamp(cv, 0.4f, 1.2f), tc); }, {cv}) < 1e-3);
}

TEST_CASE("matmul and transpose match finite differences") {
  Rng rng(11);
  Var a = Var::leaf(random_tensor({3, 5}, rng), true);
  Var b = Var::leaf(random_tensor({5, 2}, rng), true);
  Var t = constant(random_tensor({3, 2}, rng));
  Var t2 = constant(random_tensor({2, 3}, rng));
  CHECK(grad_check([&] { return sq_err(matmul(a, b), t); }, {a, b}) < 1e-3);
  CHECK(grad_check([&] { return sq_err(matmul(transpose2d(b), transpose2d(a)), t2); }, {a, b}) < 1e-3);
}

TEST_CASE("gather and scatter_add match finite differences") {
  Rng rng(13);
  Var a = Var::leaf(random_tensor({2, 6}, rng), true);
  auto idx = std::make_shared<std::vector<int32_t>>(std::vector<int32_t>{4, 4, -1, 0, 2, 5, 1, 3});
  IndexMap m{idx, 2, 6, 8, false};
  Var tg = constant(random_tensor({2, 8}, rng));
  CHECK(grad_check([&] { return sq_err(gather(a, m, {2, 8}), tg); }, {a}) < 1e-3);

  auto sidx = std::make_shared<std::vector<int32_t>>(std::vector<int32_t>{2, 0, 2, -1, 1, 1});
  IndexMap sm{sidx, 2, 6, 3, false};
  Var ts = constant(random_tensor({2, 3}, rng));
  CHECK(grad_check([&] { return sq_err(scatter_add(a, sm, {2, 3}), ts); }, {a}) < 1e-3);

  // broadcast gather: one shared block accumulates gradient across samples
  Var w = Var::leaf(random_tensor({4}, rng), true);
  auto bidx = std::make_shared<std::vector<int32_t>>(std::vector<int32_t>{3, 1, 1, 0, 2, 3});
  IndexMap bm{bidx, 3, 4, 6, true};
  Var tb = constant(random_tensor({3, 6}, rng));
  CHECK(grad_check([&] { return sq_err(gather(w, bm, {3, 6}), tb); }, {w}) < 1e-3);
}

TEST_CASE("conv layers match finite differences") {
  Rng rng(17);
  Conv2d conv(2, 3, 3, 2, 1, rng);
  Var x = Var::leaf(random_tensor({2, 2, 5, 5}, rng), true);
  Var t = constant(random_tensor({2, 3, 3, 3}, rng));
  CHECK(grad_check([&] { return sq_err(conv.forward(x), t); }, {x, conv.w, conv.b}) < 1e-3);

  DepthwiseConv2d dw(3, 3, 1, 2, rng);
  Var xd = Var::leaf(random_tensor({2, 3, 6, 6}, rng), true);
  Var td = constant(random_tensor({2, 3, 6, 6}, rng));
  CHECK(grad_check([&] { return sq_err(dw.forward(xd), td); }, {xd, dw.w}) < 1e-3);

  ConvTranspose2d up(3, 2, 2, 2, rng);
  Var xu = Var::leaf(random_tensor({2, 3, 3, 3}, rng), true);
  Var tu = constant(random_tensor({2, 2, 6, 6}, rng));
  CHECK(grad_check([&] { return sq_err(up.forward(xu), tu); }, {xu, up.w, up.b}) < 1e-3);
}

TEST_CASE("batch norm matches finite differences") {
  Rng rng(19);
  BatchNorm2d bn(3);
  Var x = Var::leaf(random_tensor({4, 3, 4, 4}, rng), true);
  Var t = constant(random_tensor({4, 3, 4, 4}, rng));
  // make gamma/beta non-trivial
  for (int i = 0; i < 3; ++i) {
    bn.gamma.node()->value.ptr()[i] = 0.8f + 0.2f * i;
    bn.beta.node()->value.ptr()[i] = 0.1f * i;
  }
  CHECK(grad_check([&] { return sq_err(bn.forward(x, true), t); }, {x, bn.gamma, bn.beta}) < 2e-3);
  CHECK(grad_check([&] { return sq_err(bn.forward(x, false), t); }, {x, bn.gamma, bn.beta}) < 1e-3);
}

TEST_CASE("maxpool and concat match finite differences") {
  Rng rng(21);
  // separate each 2x2 cell's max by a clear margin so FD stays off the kink
  Tensor xt = random_tensor({2, 2, 4, 4}, rng, -0.3f, 0.3f);
  for (int64_t nc = 0; nc < 4; ++nc)
    for (int64_t y = 0; y < 2; ++y)
      for (int64_t z = 0; z < 2; ++z) xt.ptr()[nc * 16 + (2 * y + (nc % 2)) * 4 + 2 * z + 1] += 1.f;
  Var xp = Var::leaf(xt, true);
  Var tp = constant(random_tensor({2, 2, 2, 2}, rng));
  CHECK(grad_check([&] { return sq_err(max_pool2x2(xp), tp); }, {xp}) < 1e-3);

  Var a = Var::leaf(random_tensor({2, 2, 3, 3}, rng), true);
  Var b = Var::leaf(random_tensor({2, 1, 3, 3}, rng), true);
  Var tc = constant(random_tensor({2, 3, 3, 3}, rng));
  CHECK(grad_check([&] { return sq_err(concat_channels(a, b), tc); }, {a, b}) < 1e-3);
}

TEST_CASE("second-order gradients flow through the backward graph") {
  // f(x) = sum(x^3); first grad 3x^2; grad of sum(first grad) = 6x
  Rng rng(23);
  Var x = Var::leaf(random_tensor({5}, rng, 0.5f, 1.5f), true);
  Var f = sum_all(mul(mul(x, x), x));
  Var gx = nn::grad(f, {x}, /*create_graph=*/true)[0];
  Var g2 = nn::grad(sum_all(gx), {x})[0];
  for (int64_t i = 0; i < x.numel(); ++i)
    CHECK(g2.val().ptr()[i] == doctest::Approx(6.f * x.val().ptr()[i]).epsilon(1e-4));
}

TEST_CASE("input-gradient penalty differentiates w.r.t. parameters") {
  // penalty(theta) = || d/dx sum(sigmoid(conv(x))) ||^2 against finite differences
  Rng rng(29);
  Conv2d conv(1, 2, 3, 1, 1, rng);
  Var x = Var::leaf(random_tensor({1, 1, 4, 4}, rng), true);
  auto penalty = [&] {
    Var s = sum_all(sigmoid(conv.forward(x)));
    Var gx = nn::grad(s, {x}, /*create_graph=*/true)[0];
    return sum_all(mul(gx, gx));
  };
  CHECK(grad_check(penalty, {conv.w, conv.b}) < 2e-3);
}

TEST_CASE("grad returns zeros for unreachable leaves") {
  Var a = Var::leaf(Tensor::full({3}, 2.f), true);
  Var b = Var::leaf(Tensor::full({3}, 5.f), true);
  auto g = nn::grad(sum_all(a), {b});
  for (int i = 0; i < 3; ++i) CHECK(g[0].val().ptr()[i] == 0.f);
}

TEST_CASE("detach blocks gradient flow") {
  Var a = Var::leaf(Tensor::full({3}, 2.f), true);
  Var loss = sum_all(mul(a.detach(), a));
  auto g = nn::grad(loss, {a});
  for (int i = 0; i < 3; ++i) CHECK(g[0].val().ptr()[i] == 2.f);  // only the live factor
}
