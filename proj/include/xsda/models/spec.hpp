#pragma once

#include <string>
#include <vector>

namespace xsda::models {

struct LayerSpec {
  std::string op;  // conv, sep_conv, deconv, maxpool, concat_skip
  int in_c = 0, out_c = 0, k = 0, stride = 1, dilation = 1;
  std::string activation = "none";  // relu, lrelu0.2, sigmoid, none
  bool batch_norm = false;
  bool separable = false;
  std::string note;

  bool operator==(const LayerSpec&) const = default;
};

/// Declarative architecture description; structural equality and the hash are
/// the checkpoint-compatibility contract.
struct NetworkSpec {
  std::string kind;  // GENERATOR, DISCRIMINATOR, CLOUD_UNET
  int input_channels = 4;
  std::vector<LayerSpec> layers;

  bool operator==(const NetworkSpec&) const = default;
  std::string to_string() const;
  uint64_t hash() const;
};

NetworkSpec generator_spec();
NetworkSpec discriminator_spec();
NetworkSpec cloud_unet_spec();

}  // namespace xsda::models
