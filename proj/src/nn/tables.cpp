#include "xsda/nn/tables.hpp"

#include <map>
#include <mutex>
#include <tuple>

namespace xsda::nn {

namespace {

using IdxPtr = std::shared_ptr<const std::vector<int32_t>>;

// Cache shared index vectors keyed by builder-specific integer tuples.
template <class Key>
IdxPtr cached(const Key& key, const std::function<std::vector<int32_t>()>& build) {
  static std::map<Key, IdxPtr> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto ptr = std::make_shared<const std::vector<int32_t>>(build());
  cache.emplace(key, ptr);
  return ptr;
}

}  // namespace

SamePad same_pad(int dim, int k, int stride, int dilation) {
  const int eff = (k - 1) * dilation + 1;
  SamePad p;
  p.out = (dim + stride - 1) / stride;
  const int total = std::max((p.out - 1) * stride + eff - dim, 0);
  p.pad_beg = total / 2;
  return p;
}

ConvPlan im2col_plan(int n, int c, int h, int w, int k, int stride, int dilation) {
  const SamePad ph = same_pad(h, k, stride, dilation), pw = same_pad(w, k, stride, dilation);
  ConvPlan plan;
  plan.oh = ph.out;
  plan.ow = pw.out;
  const auto key = std::make_tuple('i', c, h, w, k, stride, dilation);
  auto idx = cached(key, [&] {
    std::vector<int32_t> t(static_cast<size_t>(plan.oh) * plan.ow * c * k * k);
    size_t at = 0;
    for (int oh = 0; oh < plan.oh; ++oh)
      for (int ow = 0; ow < plan.ow; ++ow)
        for (int ci = 0; ci < c; ++ci)
          for (int ki = 0; ki < k; ++ki)
            for (int kj = 0; kj < k; ++kj) {
              const int ih = oh * stride - ph.pad_beg + ki * dilation;
              const int iw = ow * stride - pw.pad_beg + kj * dilation;
              t[at++] = (ih < 0 || ih >= h || iw < 0 || iw >= w)
                            ? -1
                            : static_cast<int32_t>((ci * h + ih) * w + iw);
            }
    return t;
  });
  plan.cols = IndexMap{idx, n, static_cast<int64_t>(c) * h * w,
                       static_cast<int64_t>(plan.oh) * plan.ow * c * k * k, false};
  return plan;
}

IndexMap rows_to_nchw_plan(int n, int oc, int oh, int ow) {
  const auto key = std::make_tuple('r', oc, oh, ow, 0, 0, 0);
  auto idx = cached(key, [&] {
    std::vector<int32_t> t(static_cast<size_t>(oc) * oh * ow);
    size_t at = 0;
    for (int ci = 0; ci < oc; ++ci)
      for (int y = 0; y < oh; ++y)
        for (int x = 0; x < ow; ++x) t[at++] = static_cast<int32_t>((y * ow + x) * oc + ci);
    return t;
  });
  const int64_t s = static_cast<int64_t>(oc) * oh * ow;
  return IndexMap{idx, n, s, s, false};
}

DwPlan dwconv_plan(int n, int c, int h, int w, int k, int stride, int dilation) {
  const SamePad ph = same_pad(h, k, stride, dilation), pw = same_pad(w, k, stride, dilation);
  DwPlan plan;
  plan.oh = ph.out;
  plan.ow = pw.out;
  const int kk = k * k;
  {
    const auto key = std::make_tuple('d', c, h, w, k, stride, dilation);
    auto idx = cached(key, [&] {
      std::vector<int32_t> t(static_cast<size_t>(c) * plan.oh * plan.ow * kk);
      size_t at = 0;
      for (int ci = 0; ci < c; ++ci)
        for (int oh = 0; oh < plan.oh; ++oh)
          for (int ow = 0; ow < plan.ow; ++ow)
            for (int ki = 0; ki < k; ++ki)
              for (int kj = 0; kj < k; ++kj) {
                const int ih = oh * stride - ph.pad_beg + ki * dilation;
                const int iw = ow * stride - pw.pad_beg + kj * dilation;
                t[at++] = (ih < 0 || ih >= h || iw < 0 || iw >= w)
                              ? -1
                              : static_cast<int32_t>((ci * h + ih) * w + iw);
              }
      return t;
    });
    plan.cols = IndexMap{idx, n, static_cast<int64_t>(c) * h * w,
                         static_cast<int64_t>(c) * plan.oh * plan.ow * kk, false};
  }
  {
    const auto key = std::make_tuple('w', c, plan.oh, plan.ow, k, 0, 0);
    auto idx = cached(key, [&] {
      std::vector<int32_t> t(static_cast<size_t>(c) * plan.oh * plan.ow * kk);
      size_t at = 0;
      for (int ci = 0; ci < c; ++ci)
        for (int oh = 0; oh < plan.oh; ++oh)
          for (int ow = 0; ow < plan.ow; ++ow)
            for (int t2 = 0; t2 < kk; ++t2) t[at++] = static_cast<int32_t>(ci * kk + t2);
      return t;
    });
    plan.wmap = IndexMap{idx, n, static_cast<int64_t>(c) * kk,
                         static_cast<int64_t>(c) * plan.oh * plan.ow * kk, true};
  }
  return plan;
}

IndexMap channel_broadcast_plan(int n, int c, int h, int w) {
  const auto key = std::make_tuple('c', c, h, w, 0, 0, 0);
  auto idx = cached(key, [&] {
    std::vector<int32_t> t(static_cast<size_t>(c) * h * w);
    size_t at = 0;
    for (int ci = 0; ci < c; ++ci)
      for (int i = 0; i < h * w; ++i) t[at++] = ci;
    return t;
  });
  return IndexMap{idx, n, c, static_cast<int64_t>(c) * h * w, true};
}

IndexMap row_broadcast_plan(int64_t rows, int width) {
  const auto key = std::make_tuple('b', width, 0, 0, 0, 0, 0);
  auto idx = cached(key, [&] {
    std::vector<int32_t> t(width);
    for (int i = 0; i < width; ++i) t[i] = i;
    return t;
  });
  return IndexMap{idx, rows, width, width, true};
}

DeconvPlan deconv_plan(int n, int ic, int ih, int iw, int oc, int k, int stride) {
  DeconvPlan plan;
  plan.oh = ih * stride;
  plan.ow = iw * stride;
  {
    const auto key = std::make_tuple('p', ic, ih, iw, 0, 0, 0);
    auto idx = cached(key, [&] {
      std::vector<int32_t> t(static_cast<size_t>(ih) * iw * ic);
      size_t at = 0;
      for (int y = 0; y < ih; ++y)
        for (int x = 0; x < iw; ++x)
          for (int ci = 0; ci < ic; ++ci) t[at++] = static_cast<int32_t>((ci * ih + y) * iw + x);
      return t;
    });
    const int64_t s = static_cast<int64_t>(ic) * ih * iw;
    plan.pre = IndexMap{idx, n, s, s, false};
  }
  {
    const auto key = std::make_tuple('s', ic, ih, iw, oc, k, stride);
    auto idx = cached(key, [&] {
      std::vector<int32_t> t(static_cast<size_t>(ih) * iw * oc * k * k);
      size_t at = 0;
      for (int y = 0; y < ih; ++y)
        for (int x = 0; x < iw; ++x)
          for (int ci = 0; ci < oc; ++ci)
            for (int ki = 0; ki < k; ++ki)
              for (int kj = 0; kj < k; ++kj) {
                const int oy = y * stride + ki, ox = x * stride + kj;
                t[at++] = (oy >= plan.oh || ox >= plan.ow)
                              ? -1
                              : static_cast<int32_t>((ci * plan.oh + oy) * plan.ow + ox);
              }
      return t;
    });
    plan.scatter = IndexMap{idx, n, static_cast<int64_t>(ih) * iw * oc * k * k,
                            static_cast<int64_t>(oc) * plan.oh * plan.ow, false};
  }
  return plan;
}

ConcatPlan concat_plan(int n, int c1, int c2, int h, int w) {
  const int64_t hw = static_cast<int64_t>(h) * w;
  const int64_t out_s = (c1 + c2) * hw;
  ConcatPlan plan;
  {
    const auto key = std::make_tuple('A', c1, c2, h, w, 0, 0);
    auto idx = cached(key, [&] {
      std::vector<int32_t> t(c1 * hw);
      for (int64_t i = 0; i < c1 * hw; ++i) t[i] = static_cast<int32_t>(i);
      return t;
    });
    plan.a = IndexMap{idx, n, c1 * hw, out_s, false};
  }
  {
    const auto key = std::make_tuple('B', c1, c2, h, w, 0, 0);
    auto idx = cached(key, [&] {
      std::vector<int32_t> t(c2 * hw);
      for (int64_t i = 0; i < c2 * hw; ++i) t[i] = static_cast<int32_t>(c1 * hw + i);
      return t;
    });
    plan.b = IndexMap{idx, n, c2 * hw, out_s, false};
  }
  return plan;
}

IndexMap upsample2x_plan(int n, int c, int h, int w) {
  const auto key = std::make_tuple('u', c, h, w, 0, 0, 0);
  auto idx = cached(key, [&] {
    std::vector<int32_t> t(static_cast<size_t>(c) * 4 * h * w);
    size_t at = 0;
    for (int ci = 0; ci < c; ++ci)
      for (int y = 0; y < 2 * h; ++y)
        for (int x = 0; x < 2 * w; ++x) t[at++] = static_cast<int32_t>((ci * h + y / 2) * w + x / 2);
    return t;
  });
  return IndexMap{idx, n, static_cast<int64_t>(c) * h * w, static_cast<int64_t>(c) * 4 * h * w, false};
}

Var ones_col(int64_t n) {
  static std::map<int64_t, Tensor> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, Tensor::full(Shape{n, 1}, 1.f)).first;
  return constant(it->second);
}

Var ones_row(int64_t n) {
  static std::map<int64_t, Tensor> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, Tensor::full(Shape{1, n}, 1.f)).first;
  return constant(it->second);
}

}  // namespace xsda::nn
