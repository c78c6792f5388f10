#pragma once

#include <string>
#include <vector>

#include "xsda/nn/rng.hpp"
#include "xsda/nn/tables.hpp"

namespace xsda::nn {

/// Named trainable parameters and persistent buffers of a module tree.
struct ParamList {
  std::vector<std::pair<std::string, Var>> params;
  std::vector<std::pair<std::string, Tensor*>> buffers;

  std::vector<Var> vars() const {
    std::vector<Var> v;
    for (const auto& [_, p] : params) v.push_back(p);
    return v;
  }
};

struct Conv2d {
  int in_c = 0, out_c = 0, k = 1, stride = 1, dilation = 1;
  Var w;  // {in_c*k*k, out_c}
  Var b;  // {1, out_c}

  Conv2d() = default;
  Conv2d(int in, int out, int k_, int stride_, int dilation_, Rng& rng, bool zero_init = false);
  Var forward(const Var& x) const;  // SAME padding
  int64_t n_params() const { return w.numel() + b.numel(); }
  void collect(ParamList& out, const std::string& prefix) const;
};

/// Depthwise k x k convolution, bias-free (bias lives on the pointwise part).
struct DepthwiseConv2d {
  int ch = 0, k = 3, stride = 1, dilation = 1;
  Var w;  // {ch, k*k}

  DepthwiseConv2d() = default;
  DepthwiseConv2d(int ch_, int k_, int stride_, int dilation_, Rng& rng);
  Var forward(const Var& x) const;
  int64_t n_params() const { return w.numel(); }
  void collect(ParamList& out, const std::string& prefix) const;
};

/// Depthwise k x k followed by pointwise 1 x 1.
struct SeparableConv2d {
  DepthwiseConv2d dw;
  Conv2d pw;

  SeparableConv2d() = default;
  SeparableConv2d(int in, int out, int k, int dilation, Rng& rng);
  Var forward(const Var& x) const { return pw.forward(dw.forward(x)); }
  int64_t n_params() const { return dw.n_params() + pw.n_params(); }
  void collect(ParamList& out, const std::string& prefix) const;
};

struct BatchNorm2d {
  int ch = 0;
  float eps = 1e-5f;
  float momentum = 0.9f;  // running = momentum*running + (1-momentum)*batch
  Var gamma, beta;        // {1, ch}
  Tensor running_mean, running_var;

  BatchNorm2d() = default;
  explicit BatchNorm2d(int ch_);
  /// Batch statistics (and running update) when train, running stats otherwise.
  Var forward(const Var& x, bool train);
  int64_t n_params() const { return gamma.numel() + beta.numel(); }
  void collect(ParamList& out, const std::string& prefix);
};

/// stride-k transposed convolution (k = stride = 2 for the U-Net decoder).
struct ConvTranspose2d {
  int in_c = 0, out_c = 0, k = 2, stride = 2;
  Var w;  // {in_c, out_c*k*k}
  Var b;  // {1, out_c}

  ConvTranspose2d() = default;
  ConvTranspose2d(int in, int out, int k_, int stride_, Rng& rng);
  Var forward(const Var& x) const;
  int64_t n_params() const { return w.numel() + b.numel(); }
  void collect(ParamList& out, const std::string& prefix) const;
};

Var max_pool2x2(const Var& x);
Var concat_channels(const Var& a, const Var& b);
Var upsample_nearest2x(const Var& x);

}  // namespace xsda::nn
