#pragma once

#include <vector>

#include "xsda/nn/graph.hpp"

namespace xsda::nn {

/// Adam with default moment parameters. Parameters are leaf Vars updated in
/// place; callers must drop any graphs referencing them before step().
class Adam {
 public:
  Adam(std::vector<Var> params, float lr, float beta1 = 0.9f, float beta2 = 0.999f,
       float eps = 1e-8f)
      : params_(std::move(params)), lr_(lr), b1_(beta1), b2_(beta2), eps_(eps) {
    for (const auto& p : params_) {
      m_.emplace_back(p.numel(), 0.f);
      v_.emplace_back(p.numel(), 0.f);
    }
  }

  const std::vector<Var>& params() const { return params_; }

  void step(const std::vector<Var>& grads) {
    ++t_;
    const float c1 = 1.f - std::pow(b1_, static_cast<float>(t_));
    const float c2 = 1.f - std::pow(b2_, static_cast<float>(t_));
    for (size_t i = 0; i < params_.size(); ++i) {
      float* p = params_[i].node()->value.ptr();
      const float* g = grads[i].val().ptr();
      float* m = m_[i].data();
      float* v = v_[i].data();
      const int64_t n = params_[i].numel();
      for (int64_t j = 0; j < n; ++j) {
        m[j] = b1_ * m[j] + (1.f - b1_) * g[j];
        v[j] = b2_ * v[j] + (1.f - b2_) * g[j] * g[j];
        p[j] -= lr_ * (m[j] / c1) / (std::sqrt(v[j] / c2) + eps_);
      }
    }
  }

 private:
  std::vector<Var> params_;
  std::vector<std::vector<float>> m_, v_;
  float lr_, b1_, b2_, eps_;
  int64_t t_ = 0;
};

}  // namespace xsda::nn
