#pragma once

#include <functional>
#include <vector>

#include "xsda/nn/ops.hpp"
#include "xsda/nn/rng.hpp"

namespace xsda::test {

using nn::Shape;
using nn::Tensor;
using nn::Var;

inline Tensor random_tensor(Shape s, nn::Rng& rng, float lo = -1.f, float hi = 1.f) {
  Tensor t(std::move(s));
  for (int64_t i = 0; i < t.numel(); ++i) t.ptr()[i] = rng.uniformf(lo, hi);
  return t;
}

/// Relative error between the analytic gradient and central finite
/// differences of a scalar-valued rebuildable function, measured per leaf as
/// ||g_fd - g|| / max(||g_fd||, ||g||); the worst leaf is returned. The
/// function must rebuild its graph from the leaf values on every call.
inline double grad_check(const std::function<Var()>& loss_fn, const std::vector<Var>& leaves,
                         double h = 1e-2) {
  Var loss = loss_fn();
  const auto gs = nn::grad(loss, leaves);
  double worst = 0.0;
  for (size_t i = 0; i < leaves.size(); ++i) {
    float* p = leaves[i].node()->value.ptr();
    const float* g = gs[i].val().ptr();
    double err2 = 0, fd2 = 0, an2 = 0;
    for (int64_t j = 0; j < leaves[i].numel(); ++j) {
      const float keep = p[j];
      p[j] = keep + static_cast<float>(h);
      const double fp = loss_fn().val().item();
      p[j] = keep - static_cast<float>(h);
      const double fm = loss_fn().val().item();
      p[j] = keep;
      const double fd = (fp - fm) / (2 * h);
      err2 += (fd - g[j]) * (fd - g[j]);
      fd2 += fd * fd;
      an2 += static_cast<double>(g[j]) * g[j];
    }
    worst = std::max(worst, std::sqrt(err2) / std::max({std::sqrt(fd2), std::sqrt(an2), 1e-8}));
  }
  return worst;
}

/// Scalar loss sum((y - target)^2)/n: well conditioned in every direction.
inline Var sq_err(const Var& y, const Var& target) {
  using namespace nn;
  Var d = sub(y, target);
  return mean_all(mul(d, d));
}

}  // namespace xsda::test
