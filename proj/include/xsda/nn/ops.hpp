#pragma once

#include "xsda/nn/graph.hpp"

namespace xsda::nn {

Var constant(Tensor t);

// elementwise, shapes must match
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);

Var neg(const Var& a);
Var scale(const Var& a, float c);
Var add_scalar(const Var& a, float c);
Var relu(const Var& a);
Var leaky_relu(const Var& a, float slope);
Var sigmoid(const Var& a);
Var log_(const Var& a);
Var reciprocal(const Var& a);
Var sqrt_(const Var& a);
Var abs_(const Var& a);
Var clamp(const Var& a, float lo, float hi);

Var reshape(const Var& a, Shape s);
Var transpose2d(const Var& a);
/// {m,k} x {k,n} -> {m,n}
Var matmul(const Var& a, const Var& b);

/// Sum of all elements, computed in double, shape {1}.
Var sum_all(const Var& a);
Var mean_all(const Var& a);
/// Fills `shape` with the scalar a ({1}).
Var broadcast_scalar(const Var& a, Shape shape);

/// Per-sample index map shared across n samples of the leading dimension.
/// gather: out[s][j] = idx[j] >= 0 ? in[s][idx[j]] : 0          (|idx| = out_stride)
/// scatter_add: out[s][idx[j]] += in[s][j] for idx[j] >= 0      (|idx| = in_stride)
/// With broadcast_in, gather reads one shared input block for every sample;
/// with broadcast_out, scatter_add accumulates every sample into one block.
struct IndexMap {
  std::shared_ptr<const std::vector<int32_t>> idx;
  int64_t n = 1;
  int64_t in_stride = 0;
  int64_t out_stride = 0;
  bool broadcast = false;  // gather: broadcast_in; scatter_add: broadcast_out
};

Var gather(const Var& a, IndexMap m, Shape out_shape);
Var scatter_add(const Var& a, IndexMap m, Shape out_shape);

}  // namespace xsda::nn
