#pragma once

#include <memory>
#include <optional>
#include <ostream>

#include "xsda/da/config.hpp"
#include "xsda/da/losses.hpp"
#include "xsda/models/checkpoint.hpp"
#include "xsda/raster/patches.hpp"

namespace xsda::da {

/// One deterministic draw from a patch pool: pool index plus a dihedral
/// augmentation element (rotation count and flips).
struct Draw {
  int64_t idx = 0;
  uint8_t rot = 0;  // quarter turns
  bool flip_h = false;
  bool flip_v = false;
};

/// Per-epoch shuffled sampling over one pool with optional augmentation.
/// Distinct pools get distinct samplers (and seeds): the two domains are
/// never indexed jointly.
class BatchSampler {
 public:
  BatchSampler(const raster::PatchSet& pool, int batch_size, uint64_t seed, bool rot90,
               bool flip_h, bool flip_v);
  std::vector<Draw> next();
  int64_t pool_size() const { return pool_->count(); }

 private:
  const raster::PatchSet* pool_;
  int batch_;
  bool rot90_, flip_h_, flip_v_;
  nn::Rng rng_;
  std::vector<int64_t> order_;
  size_t cursor_ = 0;
};

/// Assembles {B,4,S,S} image batches (and {B,1,S,S} label/valid-weight pairs
/// for labeled pools) with the draw's augmentation applied.
nn::Tensor assemble_images(const raster::PatchSet& pool, const std::vector<Draw>& draws);
std::pair<nn::Tensor, nn::Tensor> assemble_labels(const raster::PatchSet& pool,
                                                  const std::vector<Draw>& draws);

/// All loss components of one step: two discriminator BCEs, two gradient
/// penalties, two adversarial terms, two identity terms, the shared cycle
/// term, and two segmentation-consistency terms.
struct LossRecord {
  int64_t step = 0;
  float d_lu = 0, d_pv = 0, gp_lu = 0, gp_pv = 0;
  float gan_pv2lu = 0, gan_lu2pv = 0;
  float id_pv2lu = 0, id_lu2pv = 0;
  float cyc = 0;
  float seg_pv2lu = 0, seg_lu2pv = 0;

  bool finite() const;
  nlohmann::json to_json() const;
};

/// Holds the four networks, their optimizers, and the frozen classifier, and
/// runs one simultaneous update per step: both discriminators on BCE plus the
/// weighted penalty, then both generators on the weighted sum of their terms.
/// Terms with zero weight are skipped entirely.
class DATrainer {
 public:
  explicit DATrainer(const DAConfig& cfg);

  /// Loads and freezes f_LU from cfg.classifier_checkpoint.
  void load_classifier();

  LossRecord step(const nn::Tensor& pv_batch, const nn::Tensor& lu_batch);

  void save(const std::string& dir);
  void load(const std::string& dir);

  models::GeneratorNet& g_pv2lu() { return g_pv2lu_; }
  models::GeneratorNet& g_lu2pv() { return g_lu2pv_; }
  int64_t steps_done() const { return step_; }
  const DAConfig& config() const { return cfg_; }

 private:
  DAConfig cfg_;
  nn::Rng init_rng_;
  models::GeneratorNet g_pv2lu_, g_lu2pv_;
  models::DiscriminatorNet d_pv_, d_lu_;
  std::unique_ptr<models::CloudUNet> f_lu_;
  nn::Adam opt_g_, opt_d_;
  int64_t step_ = 0;
};

struct TrainDAResult {
  std::vector<LossRecord> records;
  std::string final_checkpoint_dir;
};

/// Full training run: deterministic per cfg.seed, unpaired batches, periodic
/// checkpoints under out_dir, one JSONL record per step to `log` when given.
/// A non-finite loss aborts with a reference to the last good checkpoint.
TrainDAResult train_da(const raster::PatchSet& pv_pool, const raster::PatchSet& lu_pool,
                       const DAConfig& cfg, const std::string& out_dir, std::ostream* log = nullptr);

}  // namespace xsda::da
