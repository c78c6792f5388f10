#pragma once

#include "xsda/models/spec.hpp"
#include "xsda/nn/layers.hpp"

namespace xsda::models {

using nn::ParamList;
using nn::Rng;
using nn::Var;

/// 5-layer fully convolutional generator: two separable 3x3 conv layers, two
/// more with dilation 2, then a 1x1 projection back to 4 channels. Residual
/// wiring makes it an identity-plus-correction map and the final conv starts
/// at zero, so an untrained generator is exactly the identity.
class GeneratorNet {
 public:
  explicit GeneratorNet(Rng& rng);
  Var forward(const Var& x, bool train);
  ParamList param_list();
  NetworkSpec spec() const { return generator_spec(); }

 private:
  nn::SeparableConv2d s1_, s2_, s3_, s4_;
  nn::BatchNorm2d b1_, b2_, b3_, b4_;
  nn::Conv2d final_;
};

/// PatchGAN-style discriminator: four 4x4 stride-2 convs (8,16,32,64 filters,
/// leakyReLU 0.2, batch norm) and a 1x1 conv head. score() is the pre-sigmoid
/// map, forward() the probability map of size ceil(H/16) x ceil(W/16).
class DiscriminatorNet {
 public:
  explicit DiscriminatorNet(Rng& rng);
  Var score(const Var& x, bool train);
  Var forward(const Var& x, bool train);
  ParamList param_list();
  NetworkSpec spec() const { return discriminator_spec(); }

 private:
  nn::Conv2d c1_, c2_, c3_, c4_, final_;
  nn::BatchNorm2d b1_, b2_, b3_, b4_;
};

/// Simplified U-Net cloud detector: two 2x downsampling stages, separable
/// convolutions throughout, resize-convolution upsampling with skip
/// connections and a sigmoid head. Input dims must be divisible by 4.
class CloudUNet {
 public:
  explicit CloudUNet(Rng& rng);
  Var forward(const Var& x, bool train);
  ParamList param_list();
  NetworkSpec spec() const { return cloud_unet_spec(); }

 private:
  nn::SeparableConv2d e1a_, e1b_, e2a_, e2b_, ba_, bb_, d2a_, d2b_, d1a_, d1b_;
  nn::BatchNorm2d be1a_, be1b_, be2a_, be2b_, bba_, bbb_, bu2_, bd2a_, bd2b_, bu1_, bd1a_, bd1b_;
  nn::Conv2d up2_, up1_;  // 2x2 convs applied after nearest-neighbor upsampling
  nn::Conv2d out_;
};

/// Exact trainable-scalar count.
int64_t count_params(const ParamList& params);

}  // namespace xsda::models
