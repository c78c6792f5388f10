#include "xsda/cloud/train.hpp"

#include <deque>
#include <filesystem>
#include <fstream>

#include "xsda/da/losses.hpp"
#include "xsda/da/trainer.hpp"
#include "xsda/models/checkpoint.hpp"
#include "xsda/nn/adam.hpp"

namespace xsda::cloud {

using namespace nn;

CloudTrainConfig CloudTrainConfig::from_json(const nlohmann::json& j) {
  CloudTrainConfig c;
  for (const auto& [key, val] : j.items()) {
    if (key == "steps")
      c.steps = val.get<int64_t>();
    else if (key == "batch_size")
      c.batch_size = val.get<int>();
    else if (key == "patch_size")
      c.patch_size = val.get<int>();
    else if (key == "learning_rate")
      c.learning_rate = val.get<float>();
    else if (key == "seed")
      c.seed = val.get<uint64_t>();
    else if (key == "checkpoint_every")
      c.checkpoint_every = val.get<int>();
    else
      throw std::runtime_error("unknown config key: " + key);
  }
  if (c.steps < 1 || c.batch_size < 1 || c.patch_size < 4 || c.patch_size % 4)
    throw std::runtime_error("bad cloud training config");
  return c;
}

nlohmann::json CloudTrainConfig::to_json() const {
  return nlohmann::json{{"steps", steps},
                        {"batch_size", batch_size},
                        {"patch_size", patch_size},
                        {"learning_rate", learning_rate},
                        {"seed", seed},
                        {"checkpoint_every", checkpoint_every}};
}

namespace {

// BCE over valid pixels: sum(w * bce) / sum(w)
Var masked_bce(const Var& prob, const Var& y, const Var& w, double w_sum) {
  Var p = clamp(prob, da::kProbEps, 1.f - da::kProbEps);
  Var one_m_p = add_scalar(neg(p), 1.f);
  Var one_m_y = add_scalar(neg(y), 1.f);
  Var bce = neg(add(mul(y, log_(p)), mul(one_m_y, log_(one_m_p))));
  return scale(sum_all(mul(bce, w)), static_cast<float>(1.0 / w_sum));
}

double batch_accuracy(const Tensor& prob, const Tensor& y, const Tensor& w) {
  int64_t n = 0, ok = 0;
  for (int64_t i = 0; i < prob.numel(); ++i) {
    if (w.ptr()[i] == 0.f) continue;
    ++n;
    ok += (prob.ptr()[i] >= 0.5f) == (y.ptr()[i] >= 0.5f);
  }
  return n ? 100.0 * static_cast<double>(ok) / static_cast<double>(n) : 0.0;
}

}  // namespace

CloudTrainResult train_cloud(const raster::PatchSet& labeled_pool, const CloudTrainConfig& cfg,
                             const std::string& out_dir, const std::string& name,
                             std::ostream* log) {
  if (labeled_pool.count() == 0) throw std::runtime_error("empty patch pool");
  if (!labeled_pool.labeled()) throw std::runtime_error("cloud training needs labeled patches");
  if (labeled_pool.patch_size != cfg.patch_size)
    throw std::runtime_error("pool patch size does not match config patch_size");

  Rng init_rng(cfg.seed);
  models::CloudUNet net(init_rng);
  Adam opt(net.param_list().vars(), cfg.learning_rate);
  da::BatchSampler sampler(labeled_pool, cfg.batch_size, cfg.seed + 1, false, false, false);

  std::deque<double> recent_acc;
  for (int64_t s = 0; s < cfg.steps; ++s) {
    const auto draws = sampler.next();
    const Tensor x = da::assemble_images(labeled_pool, draws);
    const auto [y, w] = da::assemble_labels(labeled_pool, draws);
    double w_sum = 0;
    for (int64_t i = 0; i < w.numel(); ++i) w_sum += w.ptr()[i];
    if (w_sum == 0) continue;  // fully invalid batch

    Var prob = net.forward(constant(x), true);
    Var loss = masked_bce(prob, constant(y), constant(w), w_sum);
    const float loss_v = loss.val().item();
    if (!std::isfinite(loss_v))
      throw std::runtime_error("training divergence at step " + std::to_string(s));
    opt.step(grad(loss, opt.params()));

    const double acc = batch_accuracy(prob.val(), y, w);
    recent_acc.push_back(acc);
    if (recent_acc.size() > 20) recent_acc.pop_front();
    if (log)
      (*log) << nlohmann::json{{"step", s}, {"loss", loss_v}, {"batch_accuracy", acc}}.dump()
             << "\n";
  }

  models::CheckpointMeta meta{"CLOUD_UNET", models::cloud_unet_spec().hash(), cfg.steps, cfg.seed,
                              cfg.to_json(), 1};
  auto pl = net.param_list();
  models::save_checkpoint(out_dir, name, meta, pl);

  CloudTrainResult res;
  res.seed = cfg.seed;
  res.checkpoint_name = name;
  double sum = 0;
  for (double a : recent_acc) sum += a;
  res.final_train_accuracy_pct = recent_acc.empty() ? 0.0 : sum / static_cast<double>(recent_acc.size());
  return res;
}

std::vector<CloudTrainResult> train_cloud_ensemble(const raster::PatchSet& labeled_pool,
                                                   const CloudTrainConfig& cfg, int k,
                                                   const std::string& out_dir, std::ostream* log) {
  std::vector<CloudTrainResult> results;
  for (int i = 0; i < k; ++i) {
    CloudTrainConfig c = cfg;
    c.seed = cfg.seed + static_cast<uint64_t>(i);
    results.push_back(train_cloud(labeled_pool, c, out_dir, "cloud_seed" + std::to_string(i), log));
  }
  double mn = 1e9, mx = -1e9, sum = 0, sum2 = 0;
  for (const auto& r : results) {
    mn = std::min(mn, r.final_train_accuracy_pct);
    mx = std::max(mx, r.final_train_accuracy_pct);
    sum += r.final_train_accuracy_pct;
  }
  const double mean = sum / results.size();
  for (const auto& r : results) sum2 += (r.final_train_accuracy_pct - mean) * (r.final_train_accuracy_pct - mean);
  nlohmann::json stats{{"k", k},
                       {"min", mn},
                       {"max", mx},
                       {"mean", mean},
                       {"std", std::sqrt(sum2 / results.size())}};
  std::filesystem::create_directories(out_dir);
  std::ofstream f(out_dir + "/ensemble_stats.json");
  f << stats.dump(2) << "\n";
  return results;
}

}  // namespace xsda::cloud
