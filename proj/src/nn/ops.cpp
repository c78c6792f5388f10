#include "xsda/nn/ops.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace xsda::nn {

namespace {

using RowMat = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapC = Eigen::Map<const RowMat>;
using Map = Eigen::Map<RowMat>;

void check_same(const Var& a, const Var& b, const char* op) {
  if (a.numel() != b.numel())
    throw std::runtime_error(std::string(op) + ": size mismatch " + shape_str(a.shape()) + " vs " +
                             shape_str(b.shape()));
}

template <class F>
Tensor unary_eval(const Var& a, F f) {
  Tensor out(a.shape());
  const float* x = a.val().ptr();
  float* y = out.ptr();
  const int64_t n = a.numel();
  for (int64_t i = 0; i < n; ++i) y[i] = f(x[i]);
  return out;
}

// constant 0/1-ish mask derived from the forward value (treated as
// locally constant, correct almost everywhere)
template <class F>
Var mask_of(const Var& a, F f) {
  return constant(unary_eval(a, f).viewed(a.shape()));
}

}  // namespace

Var constant(Tensor t) { return Var::leaf(std::move(t), false); }

Var add(const Var& a, const Var& b) {
  check_same(a, b, "add");
  Tensor out(a.shape());
  const float *x = a.val().ptr(), *y = b.val().ptr();
  float* z = out.ptr();
  for (int64_t i = 0, n = a.numel(); i < n; ++i) z[i] = x[i] + y[i];
  return make_op(std::move(out), {a, b},
                 [](const Var& g, const Var&) { return std::vector<Var>{g, g}; });
}

Var sub(const Var& a, const Var& b) {
  check_same(a, b, "sub");
  Tensor out(a.shape());
  const float *x = a.val().ptr(), *y = b.val().ptr();
  float* z = out.ptr();
  for (int64_t i = 0, n = a.numel(); i < n; ++i) z[i] = x[i] - y[i];
  return make_op(std::move(out), {a, b},
                 [](const Var& g, const Var&) { return std::vector<Var>{g, neg(g)}; });
}

Var mul(const Var& a, const Var& b) {
  check_same(a, b, "mul");
  Tensor out(a.shape());
  const float *x = a.val().ptr(), *y = b.val().ptr();
  float* z = out.ptr();
  for (int64_t i = 0, n = a.numel(); i < n; ++i) z[i] = x[i] * y[i];
  return make_op(std::move(out), {a, b}, [a, b](const Var& g, const Var&) {
    return std::vector<Var>{mul(g, b), mul(g, a)};
  });
}

Var neg(const Var& a) {
  return make_op(unary_eval(a, [](float x) { return -x; }), {a},
                 [](const Var& g, const Var&) { return std::vector<Var>{neg(g)}; });
}

Var scale(const Var& a, float c) {
  return make_op(unary_eval(a, [c](float x) { return c * x; }), {a},
                 [c](const Var& g, const Var&) { return std::vector<Var>{scale(g, c)}; });
}

Var add_scalar(const Var& a, float c) {
  return make_op(unary_eval(a, [c](float x) { return x + c; }), {a},
                 [](const Var& g, const Var&) { return std::vector<Var>{g}; });
}

Var relu(const Var& a) {
  return make_op(unary_eval(a, [](float x) { return x > 0.f ? x : 0.f; }), {a},
                 [a](const Var& g, const Var&) {
                   return std::vector<Var>{mul(g, mask_of(a, [](float x) { return x > 0.f ? 1.f : 0.f; }))};
                 });
}

Var leaky_relu(const Var& a, float slope) {
  return make_op(unary_eval(a, [slope](float x) { return x > 0.f ? x : slope * x; }), {a},
                 [a, slope](const Var& g, const Var&) {
                   return std::vector<Var>{
                       mul(g, mask_of(a, [slope](float x) { return x > 0.f ? 1.f : slope; }))};
                 });
}

Var sigmoid(const Var& a) {
  return make_op(unary_eval(a, [](float x) { return 1.f / (1.f + std::exp(-x)); }), {a},
                 [](const Var& g, const Var& self) {
                   // dy = g * y * (1 - y)
                   return std::vector<Var>{mul(g, mul(self, add_scalar(neg(self), 1.f)))};
                 });
}

Var log_(const Var& a) {
  return make_op(unary_eval(a, [](float x) { return std::log(x); }), {a},
                 [a](const Var& g, const Var&) { return std::vector<Var>{mul(g, reciprocal(a))}; });
}

Var reciprocal(const Var& a) {
  return make_op(unary_eval(a, [](float x) { return 1.f / x; }), {a},
                 [](const Var& g, const Var& self) {
                   return std::vector<Var>{neg(mul(g, mul(self, self)))};
                 });
}

Var sqrt_(const Var& a) {
  return make_op(unary_eval(a, [](float x) { return std::sqrt(x); }), {a},
                 [](const Var& g, const Var& self) {
                   return std::vector<Var>{mul(g, scale(reciprocal(self), 0.5f))};
                 });
}

Var abs_(const Var& a) {
  return make_op(unary_eval(a, [](float x) { return std::abs(x); }), {a},
                 [a](const Var& g, const Var&) {
                   return std::vector<Var>{mul(g, mask_of(a, [](float x) {
                                                 return x > 0.f ? 1.f : (x < 0.f ? -1.f : 0.f);
                                               }))};
                 });
}

Var clamp(const Var& a, float lo, float hi) {
  return make_op(unary_eval(a, [lo, hi](float x) { return x < lo ? lo : (x > hi ? hi : x); }), {a},
                 [a, lo, hi](const Var& g, const Var&) {
                   return std::vector<Var>{mul(g, mask_of(a, [lo, hi](float x) {
                                                 return (x >= lo && x <= hi) ? 1.f : 0.f;
                                               }))};
                 });
}

Var reshape(const Var& a, Shape s) {
  Shape in = a.shape();
  return make_op(a.val().viewed(std::move(s)), {a}, [in](const Var& g, const Var&) {
    return std::vector<Var>{reshape(g, in)};
  });
}

Var transpose2d(const Var& a) {
  if (a.shape().size() != 2) throw std::runtime_error("transpose2d: need rank 2");
  const int64_t m = a.shape()[0], n = a.shape()[1];
  Tensor out(Shape{n, m});
  Map(out.ptr(), n, m) = MapC(a.val().ptr(), m, n).transpose();
  return make_op(std::move(out), {a},
                 [](const Var& g, const Var&) { return std::vector<Var>{transpose2d(g)}; });
}

Var matmul(const Var& a, const Var& b) {
  if (a.shape().size() != 2 || b.shape().size() != 2 || a.shape()[1] != b.shape()[0])
    throw std::runtime_error("matmul: bad shapes " + shape_str(a.shape()) + " x " + shape_str(b.shape()));
  const int64_t m = a.shape()[0], k = a.shape()[1], n = b.shape()[1];
  Tensor out(Shape{m, n});
  Map(out.ptr(), m, n).noalias() = MapC(a.val().ptr(), m, k) * MapC(b.val().ptr(), k, n);
  return make_op(std::move(out), {a, b}, [a, b](const Var& g, const Var&) {
    return std::vector<Var>{matmul(g, transpose2d(b)), matmul(transpose2d(a), g)};
  });
}

Var sum_all(const Var& a) {
  double acc = 0.0;
  const float* x = a.val().ptr();
  for (int64_t i = 0, n = a.numel(); i < n; ++i) acc += x[i];
  Shape in = a.shape();
  return make_op(Tensor::scalar(static_cast<float>(acc)), {a}, [in](const Var& g, const Var&) {
    return std::vector<Var>{broadcast_scalar(g, in)};
  });
}

Var mean_all(const Var& a) { return scale(sum_all(a), 1.f / static_cast<float>(a.numel())); }

Var broadcast_scalar(const Var& a, Shape shape) {
  if (a.numel() != 1) throw std::runtime_error("broadcast_scalar: input must be scalar");
  return make_op(Tensor::full(shape, a.val().item()), {a},
                 [](const Var& g, const Var&) { return std::vector<Var>{sum_all(g)}; });
}

Var gather(const Var& a, IndexMap m, Shape out_shape) {
  const int64_t expect_in = m.broadcast ? m.in_stride : m.n * m.in_stride;
  if (a.numel() != expect_in)
    throw std::runtime_error("gather: input numel " + std::to_string(a.numel()) + " != expected " +
                             std::to_string(expect_in));
  if (static_cast<int64_t>(m.idx->size()) != m.out_stride)
    throw std::runtime_error("gather: index length != out_stride");
  if (shape_numel(out_shape) != m.n * m.out_stride)
    throw std::runtime_error("gather: out_shape mismatch");

  Tensor out(out_shape);
  const float* x = a.val().ptr();
  float* y = out.ptr();
  const int32_t* idx = m.idx->data();
  for (int64_t s = 0; s < m.n; ++s) {
    const float* xs = x + (m.broadcast ? 0 : s * m.in_stride);
    float* ys = y + s * m.out_stride;
    for (int64_t j = 0; j < m.out_stride; ++j) {
      const int32_t k = idx[j];
      ys[j] = k >= 0 ? xs[k] : 0.f;
    }
  }
  Shape in_shape = a.shape();
  return make_op(std::move(out), {a}, [m, in_shape](const Var& g, const Var&) {
    IndexMap back{m.idx, m.n, m.out_stride, m.in_stride, m.broadcast};
    return std::vector<Var>{scatter_add(g, back, in_shape)};
  });
}

Var scatter_add(const Var& a, IndexMap m, Shape out_shape) {
  if (a.numel() != m.n * m.in_stride)
    throw std::runtime_error("scatter_add: input numel mismatch");
  if (static_cast<int64_t>(m.idx->size()) != m.in_stride)
    throw std::runtime_error("scatter_add: index length != in_stride");
  const int64_t expect_out = m.broadcast ? m.out_stride : m.n * m.out_stride;
  if (shape_numel(out_shape) != expect_out)
    throw std::runtime_error("scatter_add: out_shape mismatch");

  Tensor out(out_shape, 0.f);
  const float* x = a.val().ptr();
  float* y = out.ptr();
  const int32_t* idx = m.idx->data();
  for (int64_t s = 0; s < m.n; ++s) {
    const float* xs = x + s * m.in_stride;
    float* ys = y + (m.broadcast ? 0 : s * m.out_stride);
    for (int64_t j = 0; j < m.in_stride; ++j) {
      const int32_t k = idx[j];
      if (k >= 0) ys[k] += xs[j];
    }
  }
  Shape in_shape = a.shape();
  return make_op(std::move(out), {a}, [m, in_shape](const Var& g, const Var&) {
    IndexMap back{m.idx, m.n, m.out_stride, m.in_stride, m.broadcast};
    return std::vector<Var>{gather(g, back, in_shape)};
  });
}

}  // namespace xsda::nn
