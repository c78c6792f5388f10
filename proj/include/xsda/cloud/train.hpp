#pragma once

#include <ostream>

#include <nlohmann/json.hpp>

#include "xsda/models/zoo.hpp"
#include "xsda/raster/patches.hpp"

namespace xsda::cloud {

struct CloudTrainConfig {
  int64_t steps = 250000;
  int batch_size = 64;
  int patch_size = 32;
  float learning_rate = 1e-4f;
  uint64_t seed = 0;
  int checkpoint_every = 0;

  static CloudTrainConfig from_json(const nlohmann::json& j);  // strict keys
  nlohmann::json to_json() const;
};

struct CloudTrainResult {
  uint64_t seed = 0;
  double final_train_accuracy_pct = 0;  // over the last 20 training batches
  std::string checkpoint_name;
};

/// Trains the cloud U-Net on labeled patches with binary cross-entropy over
/// valid pixels only (invalid labels carry zero weight). Deterministic per
/// seed; logs {step, loss, batch_accuracy} JSONL records.
CloudTrainResult train_cloud(const raster::PatchSet& labeled_pool, const CloudTrainConfig& cfg,
                             const std::string& out_dir, const std::string& name,
                             std::ostream* log = nullptr);

/// Trains k copies with seeds cfg.seed .. cfg.seed+k-1 and writes a
/// per-seed stats row {min,max,mean,std} next to the checkpoints.
std::vector<CloudTrainResult> train_cloud_ensemble(const raster::PatchSet& labeled_pool,
                                                   const CloudTrainConfig& cfg, int k,
                                                   const std::string& out_dir,
                                                   std::ostream* log = nullptr);

}  // namespace xsda::cloud
