#include "xsda/da/adapt.hpp"

#include "xsda/models/checkpoint.hpp"

namespace xsda::da {

using namespace nn;

raster::MultispectralImage adapt_image(const raster::MultispectralImage& pv,
                                       models::GeneratorNet& g) {
  NoGradGuard ng;
  const TileFn fn = [&](const Tensor& t) { return g.forward(constant(t), false).val(); };
  const auto grids = tiled_apply(pv, kAdaptTile, kAdaptStride, kAdaptMargin, raster::kNumBands, fn);

  raster::MultispectralImage out(pv.height(), pv.width(), raster::DomainTag::PV_ADAPTED_333M);
  for (int b = 0; b < raster::kNumBands; ++b) {
    out.bands[b] = grids[b];
    for (auto& v : out.bands[b].v) v = std::min(std::max(v, 0.f), 1.5f);
  }
  out.validity = pv.validity;
  out.geo = pv.geo;
  for (int b = 0; b < raster::kNumBands; ++b)
    for (size_t i = 0; i < out.validity.v.size(); ++i)
      if (!out.validity.v[i]) out.bands[b].v[i] = 0.f;
  return out;
}

std::unique_ptr<models::GeneratorNet> load_generator(const std::string& ckpt_dir,
                                                     const std::string& name) {
  const auto meta = models::read_checkpoint_meta(ckpt_dir, name);
  if (meta.kind != "GENERATOR")
    throw std::runtime_error("checkpoint " + name + " has kind " + meta.kind +
                             ", expected GENERATOR");
  Rng rng(0);
  auto g = std::make_unique<models::GeneratorNet>(rng);
  auto pl = g->param_list();
  models::load_checkpoint(ckpt_dir, name, models::generator_spec().hash(), pl);
  return g;
}

}  // namespace xsda::da
