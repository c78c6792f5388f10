#include "xsda/nn/layers.hpp"

#include <cmath>

namespace xsda::nn {

namespace {

Tensor he_normal(Shape shape, int64_t fan_in, Rng& rng) {
  Tensor t(shape);
  const float std = std::sqrt(2.f / static_cast<float>(fan_in));
  float* p = t.ptr();
  for (int64_t i = 0; i < t.numel(); ++i) p[i] = static_cast<float>(rng.normal()) * std;
  return t;
}

void expect_nchw(const Var& x, const char* who) {
  if (x.shape().size() != 4)
    throw std::runtime_error(std::string(who) + ": expected NCHW input, got " + shape_str(x.shape()));
}

}  // namespace

Conv2d::Conv2d(int in, int out, int k_, int stride_, int dilation_, Rng& rng, bool zero_init)
    : in_c(in), out_c(out), k(k_), stride(stride_), dilation(dilation_) {
  const int64_t fan_in = static_cast<int64_t>(in) * k * k;
  w = Var::leaf(zero_init ? Tensor::zeros({fan_in, out}) : he_normal({fan_in, out}, fan_in, rng), true);
  b = Var::leaf(Tensor::zeros({1, out}), true);
}

Var Conv2d::forward(const Var& x) const {
  expect_nchw(x, "Conv2d");
  const int n = static_cast<int>(x.shape()[0]), c = static_cast<int>(x.shape()[1]);
  const int h = static_cast<int>(x.shape()[2]), wd = static_cast<int>(x.shape()[3]);
  if (c != in_c) throw std::runtime_error("Conv2d: channel mismatch");
  const ConvPlan plan = im2col_plan(n, c, h, wd, k, stride, dilation);
  const int64_t rows = static_cast<int64_t>(n) * plan.oh * plan.ow;
  Var cols = gather(x, plan.cols, {rows, static_cast<int64_t>(c) * k * k});
  Var out = matmul(cols, w);
  out = add(out, gather(reshape(b, {out_c}), row_broadcast_plan(rows, out_c), {rows, out_c}));
  return gather(out, rows_to_nchw_plan(n, out_c, plan.oh, plan.ow), {n, out_c, plan.oh, plan.ow});
}

void Conv2d::collect(ParamList& out, const std::string& prefix) const {
  out.params.emplace_back(prefix + ".w", w);
  out.params.emplace_back(prefix + ".b", b);
}

DepthwiseConv2d::DepthwiseConv2d(int ch_, int k_, int stride_, int dilation_, Rng& rng)
    : ch(ch_), k(k_), stride(stride_), dilation(dilation_) {
  w = Var::leaf(he_normal({ch, static_cast<int64_t>(k) * k}, k * k, rng), true);
}

Var DepthwiseConv2d::forward(const Var& x) const {
  expect_nchw(x, "DepthwiseConv2d");
  const int n = static_cast<int>(x.shape()[0]), c = static_cast<int>(x.shape()[1]);
  const int h = static_cast<int>(x.shape()[2]), wd = static_cast<int>(x.shape()[3]);
  if (c != ch) throw std::runtime_error("DepthwiseConv2d: channel mismatch");
  const DwPlan plan = dwconv_plan(n, c, h, wd, k, stride, dilation);
  const int64_t rows = static_cast<int64_t>(n) * c * plan.oh * plan.ow;
  const int64_t kk = static_cast<int64_t>(k) * k;
  Var cols = gather(x, plan.cols, {rows, kk});
  Var wb = gather(reshape(w, {ch * kk}), plan.wmap, {rows, kk});
  Var out = matmul(mul(cols, wb), ones_col(kk));
  return reshape(out, {n, c, plan.oh, plan.ow});
}

void DepthwiseConv2d::collect(ParamList& out, const std::string& prefix) const {
  out.params.emplace_back(prefix + ".w", w);
}

SeparableConv2d::SeparableConv2d(int in, int out, int k, int dilation, Rng& rng)
    : dw(in, k, 1, dilation, rng), pw(in, out, 1, 1, 1, rng) {}

void SeparableConv2d::collect(ParamList& out, const std::string& prefix) const {
  dw.collect(out, prefix + ".dw");
  pw.collect(out, prefix + ".pw");
}

BatchNorm2d::BatchNorm2d(int ch_) : ch(ch_) {
  gamma = Var::leaf(Tensor::full({1, ch}, 1.f), true);
  beta = Var::leaf(Tensor::zeros({1, ch}), true);
  running_mean = Tensor::zeros({1, ch});
  running_var = Tensor::full({1, ch}, 1.f);
}

Var BatchNorm2d::forward(const Var& x, bool train) {
  expect_nchw(x, "BatchNorm2d");
  const int n = static_cast<int>(x.shape()[0]), c = static_cast<int>(x.shape()[1]);
  const int h = static_cast<int>(x.shape()[2]), wd = static_cast<int>(x.shape()[3]);
  if (c != ch) throw std::runtime_error("BatchNorm2d: channel mismatch");
  const int64_t hw = static_cast<int64_t>(h) * wd;
  const IndexMap bcast = channel_broadcast_plan(n, c, h, wd);
  const Shape full = x.shape();

  auto channel_mean = [&](const Var& t) {
    Var s1 = matmul(reshape(t, {static_cast<int64_t>(n) * c, hw}), ones_col(hw));  // {N*C,1}
    Var s2 = matmul(ones_row(n), reshape(s1, {n, c}));                             // {1,C}
    return scale(s2, 1.f / static_cast<float>(n * hw));
  };
  auto bc = [&](const Var& v) { return gather(reshape(v, {c}), bcast, full); };

  if (train) {
    Var mean = channel_mean(x);
    Var xc = sub(x, bc(mean));
    Var var = channel_mean(mul(xc, xc));
    {
      // running-statistics update lives outside the graph
      float* rm = running_mean.ptr();
      float* rv = running_var.ptr();
      const float* mv = mean.val().ptr();
      const float* vv = var.val().ptr();
      for (int i = 0; i < ch; ++i) {
        rm[i] = momentum * rm[i] + (1.f - momentum) * mv[i];
        rv[i] = momentum * rv[i] + (1.f - momentum) * vv[i];
      }
    }
    Var inv = reciprocal(sqrt_(add_scalar(var, eps)));
    return add(mul(xc, bc(mul(gamma, inv))), bc(beta));
  }

  Tensor inv_t({1, ch});
  for (int i = 0; i < ch; ++i)
    inv_t.ptr()[i] = 1.f / std::sqrt(running_var.ptr()[i] + eps);
  Var xc = sub(x, bc(constant(running_mean)));
  return add(mul(xc, bc(mul(gamma, constant(inv_t)))), bc(beta));
}

void BatchNorm2d::collect(ParamList& out, const std::string& prefix) {
  out.params.emplace_back(prefix + ".gamma", gamma);
  out.params.emplace_back(prefix + ".beta", beta);
  out.buffers.emplace_back(prefix + ".running_mean", &running_mean);
  out.buffers.emplace_back(prefix + ".running_var", &running_var);
}

ConvTranspose2d::ConvTranspose2d(int in, int out, int k_, int stride_, Rng& rng)
    : in_c(in), out_c(out), k(k_), stride(stride_) {
  const int64_t fan_in = static_cast<int64_t>(in) * k * k;
  w = Var::leaf(he_normal({in, static_cast<int64_t>(out) * k * k}, fan_in, rng), true);
  b = Var::leaf(Tensor::zeros({1, out}), true);
}

Var ConvTranspose2d::forward(const Var& x) const {
  expect_nchw(x, "ConvTranspose2d");
  const int n = static_cast<int>(x.shape()[0]), c = static_cast<int>(x.shape()[1]);
  const int h = static_cast<int>(x.shape()[2]), wd = static_cast<int>(x.shape()[3]);
  if (c != in_c) throw std::runtime_error("ConvTranspose2d: channel mismatch");
  const DeconvPlan plan = deconv_plan(n, c, h, wd, out_c, k, stride);
  const int64_t rows = static_cast<int64_t>(n) * h * wd;
  Var pre = gather(x, plan.pre, {rows, c});
  Var contrib = matmul(pre, w);  // rows x (oc*k*k)
  Var out = scatter_add(reshape(contrib, {rows * out_c * k * k}), plan.scatter,
                        {n, out_c, plan.oh, plan.ow});
  Var bb = gather(reshape(b, {out_c}), channel_broadcast_plan(n, out_c, plan.oh, plan.ow),
                  {n, out_c, plan.oh, plan.ow});
  return add(out, bb);
}

void ConvTranspose2d::collect(ParamList& out, const std::string& prefix) const {
  out.params.emplace_back(prefix + ".w", w);
  out.params.emplace_back(prefix + ".b", b);
}

Var max_pool2x2(const Var& x) {
  expect_nchw(x, "max_pool2x2");
  const int64_t n = x.shape()[0], c = x.shape()[1], h = x.shape()[2], w = x.shape()[3];
  if (h % 2 || w % 2) throw std::runtime_error("max_pool2x2: dims must be even");
  const int64_t oh = h / 2, ow = w / 2;
  // argmax indices depend on the data: build the table per call
  auto idx = std::make_shared<std::vector<int32_t>>(n * c * oh * ow);
  const float* p = x.val().ptr();
  size_t at = 0;
  for (int64_t nc = 0; nc < n * c; ++nc) {
    const float* plane = p + nc * h * w;
    for (int64_t y = 0; y < oh; ++y)
      for (int64_t z = 0; z < ow; ++z) {
        int64_t best = (2 * y) * w + 2 * z;
        for (int dy = 0; dy < 2; ++dy)
          for (int dz = 0; dz < 2; ++dz) {
            const int64_t cand = (2 * y + dy) * w + (2 * z + dz);
            if (plane[cand] > plane[best]) best = cand;
          }
        (*idx)[at++] = static_cast<int32_t>(nc * h * w + best);
      }
  }
  IndexMap m{idx, 1, n * c * h * w, n * c * oh * ow, false};
  return gather(x, m, {n, c, oh, ow});
}

Var upsample_nearest2x(const Var& x) {
  expect_nchw(x, "upsample_nearest2x");
  const int n = static_cast<int>(x.shape()[0]), c = static_cast<int>(x.shape()[1]);
  const int h = static_cast<int>(x.shape()[2]), w = static_cast<int>(x.shape()[3]);
  return gather(x, upsample2x_plan(n, c, h, w), {n, c, 2 * h, 2 * w});
}

Var concat_channels(const Var& a, const Var& b) {
  expect_nchw(a, "concat_channels");
  expect_nchw(b, "concat_channels");
  const int n = static_cast<int>(a.shape()[0]);
  const int c1 = static_cast<int>(a.shape()[1]), c2 = static_cast<int>(b.shape()[1]);
  const int h = static_cast<int>(a.shape()[2]), w = static_cast<int>(a.shape()[3]);
  if (b.shape()[0] != n || b.shape()[2] != h || b.shape()[3] != w)
    throw std::runtime_error("concat_channels: spatial/batch mismatch");
  const ConcatPlan plan = concat_plan(n, c1, c2, h, w);
  const Shape out{n, static_cast<int64_t>(c1 + c2), h, w};
  return add(scatter_add(a, plan.a, out), scatter_add(b, plan.b, out));
}

}  // namespace xsda::nn
