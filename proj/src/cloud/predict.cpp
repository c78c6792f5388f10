#include "xsda/cloud/predict.hpp"

#include "xsda/da/tiling.hpp"
#include "xsda/models/checkpoint.hpp"

namespace xsda::cloud {

using namespace nn;
using raster::Grid;

namespace {

int reflect(int i, int n) {
  if (n == 1) return 0;
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * n - 2 - i;
  }
  return i;
}

// whole-tile pass with reflect padding up to multiples of 4
Tensor padded_pass(models::CloudUNet& net, const Tensor& t) {
  const int h = static_cast<int>(t.shape[2]), w = static_cast<int>(t.shape[3]);
  const int ph = (h + 3) / 4 * 4, pw = (w + 3) / 4 * 4;
  if (ph == h && pw == w) return net.forward(constant(t), false).val();
  Tensor p({1, raster::kNumBands, ph, pw});
  for (int b = 0; b < raster::kNumBands; ++b)
    for (int r = 0; r < ph; ++r)
      for (int c = 0; c < pw; ++c)
        p.ptr()[(b * ph + r) * pw + c] = t.ptr()[(b * h + reflect(r, h)) * w + reflect(c, w)];
  const Tensor y = net.forward(constant(p), false).val();
  Tensor out({1, 1, h, w});
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) out.ptr()[r * w + c] = y.ptr()[r * pw + c];
  return out;
}

}  // namespace

CloudPrediction predict_cloud(const raster::MultispectralImage& image, models::CloudUNet& net,
                              float threshold) {
  const int h = image.height(), w = image.width();
  CloudPrediction out{Grid(h, w, 0.f), raster::CloudMask(h, w, image.resolution_m, raster::kInvalidLabel)};

  // valid bounding box, so invalid border padding cannot shift the tiling
  int r0 = h, r1 = -1, c0 = w, c1 = -1;
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c)
      if (image.validity.at(r, c)) {
        r0 = std::min(r0, r);
        r1 = std::max(r1, r);
        c0 = std::min(c0, c);
        c1 = std::max(c1, c);
      }
  if (r1 < 0) return out;  // nothing valid

  raster::MultispectralImage sub(r1 - r0 + 1, c1 - c0 + 1, image.domain_tag);
  for (int b = 0; b < raster::kNumBands; ++b)
    for (int r = 0; r <= r1 - r0; ++r)
      for (int c = 0; c <= c1 - c0; ++c) sub.bands[b].at(r, c) = image.bands[b].at(r0 + r, c0 + c);

  NoGradGuard ng;
  std::vector<Grid> prob;
  if (sub.height() >= kPredictTile && sub.width() >= kPredictTile) {
    const da::TileFn fn = [&](const Tensor& t) { return net.forward(constant(t), false).val(); };
    prob = da::tiled_apply(sub, kPredictTile, kPredictStride, kPredictMargin, 1, fn);
  } else {
    Tensor t({1, raster::kNumBands, sub.height(), sub.width()});
    float* dst = t.ptr();
    for (int b = 0; b < raster::kNumBands; ++b)
      for (size_t i = 0; i < sub.bands[b].v.size(); ++i) *dst++ = sub.bands[b].v[i];
    const Tensor y = padded_pass(net, t);
    prob.emplace_back(sub.height(), sub.width());
    std::copy(y.ptr(), y.ptr() + y.numel(), prob[0].v.begin());
  }

  for (int r = 0; r <= r1 - r0; ++r)
    for (int c = 0; c <= c1 - c0; ++c) {
      const float p = std::min(std::max(prob[0].at(r, c), 0.f), 1.f);
      out.probability.at(r0 + r, c0 + c) = p;
    }
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c)
      if (image.validity.at(r, c))
        out.mask.labels.at(r, c) =
            out.probability.at(r, c) >= threshold ? raster::kCloudy : raster::kClear;
  return out;
}

std::unique_ptr<models::CloudUNet> load_cloud_net(const std::string& ckpt_dir,
                                                  const std::string& name) {
  const auto meta = models::read_checkpoint_meta(ckpt_dir, name);
  if (meta.kind != "CLOUD_UNET")
    throw std::runtime_error("checkpoint " + name + " has kind " + meta.kind +
                             ", expected CLOUD_UNET");
  Rng rng(0);
  auto net = std::make_unique<models::CloudUNet>(rng);
  auto pl = net->param_list();
  models::load_checkpoint(ckpt_dir, name, models::cloud_unet_spec().hash(), pl);
  return net;
}

}  // namespace xsda::cloud
