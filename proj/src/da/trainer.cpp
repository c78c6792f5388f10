#include "xsda/da/trainer.hpp"

#include <cmath>
#include <filesystem>

namespace xsda::da {

using namespace nn;
using raster::PatchSet;

BatchSampler::BatchSampler(const PatchSet& pool, int batch_size, uint64_t seed, bool rot90,
                           bool flip_h, bool flip_v)
    : pool_(&pool), batch_(batch_size), rot90_(rot90), flip_h_(flip_h), flip_v_(flip_v), rng_(seed) {
  if (pool.count() == 0) throw std::runtime_error("empty patch pool");
  order_.resize(pool.count());
  for (int64_t i = 0; i < pool.count(); ++i) order_[i] = i;
  rng_.shuffle(order_);
}

std::vector<Draw> BatchSampler::next() {
  std::vector<Draw> out;
  out.reserve(batch_);
  for (int i = 0; i < batch_; ++i) {
    if (cursor_ >= order_.size()) {
      rng_.shuffle(order_);
      cursor_ = 0;
    }
    Draw d;
    d.idx = order_[cursor_++];
    if (rot90_) d.rot = static_cast<uint8_t>(rng_.uniform_int(4));
    if (flip_h_) d.flip_h = rng_.uniform_int(2) != 0;
    if (flip_v_) d.flip_v = rng_.uniform_int(2) != 0;
    out.push_back(d);
  }
  return out;
}

namespace {

// source coordinates for output (r,c): flips first, then quarter turns
inline std::pair<int, int> src_coord(int r, int c, int s, const Draw& d) {
  for (int k = 0; k < d.rot; ++k) {
    const int nr = c, nc = s - 1 - r;
    r = nr;
    c = nc;
  }
  if (d.flip_h) c = s - 1 - c;
  if (d.flip_v) r = s - 1 - r;
  return {r, c};
}

}  // namespace

Tensor assemble_images(const PatchSet& pool, const std::vector<Draw>& draws) {
  const int s = pool.patch_size;
  Tensor out({static_cast<int64_t>(draws.size()), raster::kNumBands, s, s});
  float* dst = out.ptr();
  for (const Draw& d : draws) {
    const float* p = pool.patch(d.idx);
    for (int b = 0; b < raster::kNumBands; ++b)
      for (int r = 0; r < s; ++r)
        for (int c = 0; c < s; ++c) {
          const auto [sr, sc] = src_coord(r, c, s, d);
          *dst++ = p[(b * s + sr) * s + sc];
        }
  }
  return out;
}

std::pair<Tensor, Tensor> assemble_labels(const PatchSet& pool, const std::vector<Draw>& draws) {
  if (!pool.labeled()) throw std::runtime_error("pool has no labels");
  const int s = pool.patch_size;
  Tensor y({static_cast<int64_t>(draws.size()), 1, s, s});
  Tensor w({static_cast<int64_t>(draws.size()), 1, s, s});
  float* yd = y.ptr();
  float* wd = w.ptr();
  for (const Draw& d : draws) {
    const uint8_t* l = pool.label(d.idx);
    for (int r = 0; r < s; ++r)
      for (int c = 0; c < s; ++c) {
        const auto [sr, sc] = src_coord(r, c, s, d);
        const uint8_t v = l[sr * s + sc];
        *yd++ = v == raster::kCloudy ? 1.f : 0.f;
        *wd++ = v == raster::kInvalidLabel ? 0.f : 1.f;
      }
  }
  return {std::move(y), std::move(w)};
}

bool LossRecord::finite() const {
  for (float v : {d_lu, d_pv, gp_lu, gp_pv, gan_pv2lu, gan_lu2pv, id_pv2lu, id_lu2pv, cyc,
                  seg_pv2lu, seg_lu2pv})
    if (!std::isfinite(v)) return false;
  return true;
}

nlohmann::json LossRecord::to_json() const {
  return nlohmann::json{{"step", step},          {"d_lu", d_lu},
                        {"d_pv", d_pv},          {"gp_lu", gp_lu},
                        {"gp_pv", gp_pv},        {"gan_pv2lu", gan_pv2lu},
                        {"gan_lu2pv", gan_lu2pv}, {"id_pv2lu", id_pv2lu},
                        {"id_lu2pv", id_lu2pv},  {"cyc", cyc},
                        {"seg_pv2lu", seg_pv2lu}, {"seg_lu2pv", seg_lu2pv}};
}

namespace {

std::vector<Var> concat_params(nn::ParamList a, nn::ParamList b) {
  auto va = a.vars();
  const auto vb = b.vars();
  va.insert(va.end(), vb.begin(), vb.end());
  return va;
}

}  // namespace

DATrainer::DATrainer(const DAConfig& cfg)
    : cfg_(cfg),
      init_rng_(cfg.seed),
      g_pv2lu_(init_rng_),
      g_lu2pv_(init_rng_),
      d_pv_(init_rng_),
      d_lu_(init_rng_),
      opt_g_(concat_params(g_pv2lu_.param_list(), g_lu2pv_.param_list()), cfg.learning_rate),
      opt_d_(concat_params(d_pv_.param_list(), d_lu_.param_list()), cfg.learning_rate) {}

void DATrainer::load_classifier() {
  if (cfg_.classifier_checkpoint.empty())
    throw std::runtime_error("lambda_seg > 0 requires classifier_checkpoint");
  nn::Rng tmp(0);
  f_lu_ = std::make_unique<models::CloudUNet>(tmp);
  auto pl = f_lu_->param_list();
  models::load_checkpoint(cfg_.classifier_checkpoint, cfg_.classifier_name,
                          models::cloud_unet_spec().hash(), pl);
  freeze(pl);
}

LossRecord DATrainer::step(const Tensor& pv_batch, const Tensor& lu_batch) {
  LossRecord rec;
  rec.step = step_;
  Var pv = constant(pv_batch);
  Var lu = constant(lu_batch);

  // generator forwards shared by both phases
  Var fake_lu = g_pv2lu_.forward(pv, true);
  Var fake_pv = g_lu2pv_.forward(lu, true);

  {  // discriminator update
    Var loss_d_lu = disc_loss(d_lu_, lu, fake_lu);
    Var loss_d_pv = disc_loss(d_pv_, pv, fake_pv);
    Var d_total = add(loss_d_lu, loss_d_pv);
    Var pen_lu, pen_pv;
    if (cfg_.gp_weight > 0) {
      pen_lu = gradient_penalty(d_lu_, lu_batch);
      pen_pv = gradient_penalty(d_pv_, pv_batch);
      d_total = add(d_total, scale(add(pen_lu, pen_pv), cfg_.gp_weight));
      rec.gp_lu = pen_lu.val().item();
      rec.gp_pv = pen_pv.val().item();
    }
    rec.d_lu = loss_d_lu.val().item();
    rec.d_pv = loss_d_pv.val().item();
    opt_d_.step(grad(d_total, opt_d_.params()));
  }

  {  // generator update against the just-updated discriminators
    std::optional<Var> total;
    auto accum = [&](const Var& term, float weight) {
      if (weight == 0) return;
      Var w = scale(term, weight);
      total = total ? add(*total, w) : w;
    };
    if (cfg_.lambda_gan > 0) {
      Var gan1 = gan_loss(d_lu_, fake_lu);
      Var gan2 = gan_loss(d_pv_, fake_pv);
      rec.gan_pv2lu = gan1.val().item();
      rec.gan_lu2pv = gan2.val().item();
      accum(gan1, cfg_.lambda_gan);
      accum(gan2, cfg_.lambda_gan);
    }
    if (cfg_.lambda_id > 0) {
      Var id1 = l1_mean(pv, fake_lu);
      Var id2 = l1_mean(lu, fake_pv);
      rec.id_pv2lu = id1.val().item();
      rec.id_lu2pv = id2.val().item();
      accum(id1, cfg_.lambda_id);
      accum(id2, cfg_.lambda_id);
    }
    if (cfg_.lambda_cyc > 0) {
      Var cyc_pv = g_lu2pv_.forward(fake_lu, true);
      Var cyc_lu = g_pv2lu_.forward(fake_pv, true);
      Var cyc = add(l1_mean(pv, cyc_pv), l1_mean(lu, cyc_lu));
      rec.cyc = cyc.val().item();
      accum(cyc, cfg_.lambda_cyc);
    }
    if (cfg_.lambda_seg > 0) {
      if (!f_lu_) throw std::runtime_error("lambda_seg > 0 but no classifier loaded");
      Var seg1 = seg_consistency_loss(*f_lu_, pv, fake_lu);
      Var seg2 = seg_consistency_loss(*f_lu_, lu, fake_pv);
      rec.seg_pv2lu = seg1.val().item();
      rec.seg_lu2pv = seg2.val().item();
      accum(seg1, cfg_.lambda_seg);
      accum(seg2, cfg_.lambda_seg);
    }
    if (total) opt_g_.step(grad(*total, opt_g_.params()));
  }

  ++step_;
  if (!rec.finite()) throw std::runtime_error("training divergence at step " + std::to_string(rec.step));
  return rec;
}

void DATrainer::save(const std::string& dir) {
  std::filesystem::create_directories(dir);
  const models::CheckpointMeta base{"", 0, step_, cfg_.seed, cfg_.to_json(), 1};
  auto save_one = [&](const std::string& name, const std::string& kind, uint64_t hash,
                      nn::ParamList pl) {
    models::CheckpointMeta m = base;
    m.kind = kind;
    m.spec_hash = hash;
    models::save_checkpoint(dir, name, m, pl);
  };
  save_one("g_pv2lu", "GENERATOR", models::generator_spec().hash(), g_pv2lu_.param_list());
  save_one("g_lu2pv", "GENERATOR", models::generator_spec().hash(), g_lu2pv_.param_list());
  save_one("d_pv", "DISCRIMINATOR", models::discriminator_spec().hash(), d_pv_.param_list());
  save_one("d_lu", "DISCRIMINATOR", models::discriminator_spec().hash(), d_lu_.param_list());
}

void DATrainer::load(const std::string& dir) {
  auto load_one = [&](const std::string& name, uint64_t hash, nn::ParamList pl) {
    const auto meta = models::load_checkpoint(dir, name, hash, pl);
    step_ = meta.step;
  };
  load_one("g_pv2lu", models::generator_spec().hash(), g_pv2lu_.param_list());
  load_one("g_lu2pv", models::generator_spec().hash(), g_lu2pv_.param_list());
  load_one("d_pv", models::discriminator_spec().hash(), d_pv_.param_list());
  load_one("d_lu", models::discriminator_spec().hash(), d_lu_.param_list());
}

TrainDAResult train_da(const PatchSet& pv_pool, const PatchSet& lu_pool, const DAConfig& cfg,
                       const std::string& out_dir, std::ostream* log) {
  if (pv_pool.count() == 0 || lu_pool.count() == 0) throw std::runtime_error("empty patch pool");
  if (pv_pool.patch_size != cfg.patch_size || lu_pool.patch_size != cfg.patch_size)
    throw std::runtime_error("pool patch size does not match config patch_size");

  DATrainer trainer(cfg);
  if (cfg.lambda_seg > 0) trainer.load_classifier();

  // independent draw streams per domain: batches are never paired
  BatchSampler pv_sampler(pv_pool, cfg.batch_size, cfg.seed + 1, cfg.aug_rot90, cfg.aug_flip_h,
                          cfg.aug_flip_v);
  BatchSampler lu_sampler(lu_pool, cfg.batch_size, cfg.seed + 2, cfg.aug_rot90, cfg.aug_flip_h,
                          cfg.aug_flip_v);

  int64_t steps = cfg.steps;
  if (steps <= 0) {
    const int64_t per_epoch = std::min(pv_pool.count(), lu_pool.count()) / cfg.batch_size;
    steps = static_cast<int64_t>(cfg.epochs) * std::max<int64_t>(1, per_epoch);
  }

  TrainDAResult res;
  std::string last_good = "(none)";
  std::filesystem::create_directories(out_dir);
  for (int64_t s = 0; s < steps; ++s) {
    LossRecord rec;
    try {
      rec = trainer.step(assemble_images(pv_pool, pv_sampler.next()),
                         assemble_images(lu_pool, lu_sampler.next()));
    } catch (const std::exception& e) {
      throw std::runtime_error(std::string(e.what()) + "; last good checkpoint: " + last_good);
    }
    res.records.push_back(rec);
    if (log) (*log) << rec.to_json().dump() << "\n";
    if (cfg.checkpoint_every > 0 && (s + 1) % cfg.checkpoint_every == 0 && s + 1 < steps) {
      const std::string ck = out_dir + "/step_" + std::to_string(s + 1);
      trainer.save(ck);
      last_good = ck;
    }
  }
  res.final_checkpoint_dir = out_dir + "/final";
  trainer.save(res.final_checkpoint_dir);
  return res;
}

}  // namespace xsda::da
