#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

namespace xsda::da {

/// Training configuration for the cycle-consistent adversarial adaptation.
/// Default loss weights put the terms at the same magnitude
/// (lambda_cyc = lambda_id = 5, lambda_seg = lambda_gan = 1).
struct DAConfig {
  float lambda_gan = 1.f;
  float lambda_id = 5.f;
  float lambda_cyc = 5.f;
  float lambda_seg = 1.f;
  float gp_weight = 10.f;
  float learning_rate = 1e-4f;
  int batch_size = 48;
  int steps = 0;  // 0: derive from epochs * floor(min pool / batch)
  int epochs = 25;
  int patch_size = 64;
  uint64_t seed = 0;
  bool aug_rot90 = true;
  bool aug_flip_h = true;
  bool aug_flip_v = true;
  std::string classifier_checkpoint;  // required when lambda_seg > 0
  std::string classifier_name = "cloud_seed0";
  int checkpoint_every = 0;  // 0: final only

  /// Named ablation presets, one per comparison-table row:
  ///   full-da      all terms on (1, 5, 5, 1)
  ///   no-id        lambda_id = 0
  ///   no-seg       lambda_seg = 0
  ///   no-cyc-seg   lambda_cyc = lambda_seg = 0
  ///   no-seg-id    lambda_seg = lambda_id = 0
  ///   gan-only     lambda_id = lambda_cyc = lambda_seg = 0
  ///   identity-only lambda_id = 100, all other terms 0
  static DAConfig preset(const std::string& name);

  /// Strict parse: unknown keys are errors. A "preset" key seeds the values,
  /// remaining keys override.
  static DAConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

}  // namespace xsda::da
