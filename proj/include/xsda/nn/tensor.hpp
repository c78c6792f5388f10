#pragma once

#include <cstdint>
#include <memory>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace xsda::nn {

using Shape = std::vector<int64_t>;

inline int64_t shape_numel(const Shape& s) {
  int64_t n = 1;
  for (int64_t d : s) n *= d;
  return n;
}

std::string shape_str(const Shape& s);

/// Dense float tensor with shared immutable storage (graph values are never
/// mutated after creation, so views may alias).
struct Tensor {
  Shape shape;
  std::shared_ptr<std::vector<float>> data;

  Tensor() : data(std::make_shared<std::vector<float>>()) {}
  explicit Tensor(Shape s, float fill = 0.f)
      : shape(std::move(s)), data(std::make_shared<std::vector<float>>(shape_numel(shape), fill)) {}
  Tensor(Shape s, std::vector<float> values)
      : shape(std::move(s)), data(std::make_shared<std::vector<float>>(std::move(values))) {
    if (static_cast<int64_t>(data->size()) != shape_numel(shape))
      throw std::runtime_error("tensor data size does not match shape " + shape_str(shape));
  }

  static Tensor zeros(Shape s) { return Tensor(std::move(s), 0.f); }
  static Tensor full(Shape s, float v) { return Tensor(std::move(s), v); }
  static Tensor scalar(float v) { return Tensor(Shape{1}, std::vector<float>{v}); }

  int64_t numel() const { return static_cast<int64_t>(data->size()); }
  float* ptr() { return data->data(); }
  const float* ptr() const { return data->data(); }
  float item() const {
    if (numel() != 1) throw std::runtime_error("item() on non-scalar tensor");
    return (*data)[0];
  }
  /// New tensor viewing the same storage under a different shape.
  Tensor viewed(Shape s) const {
    if (shape_numel(s) != numel())
      throw std::runtime_error("view " + shape_str(s) + " incompatible with " + shape_str(shape));
    Tensor t;
    t.shape = std::move(s);
    t.data = data;
    return t;
  }
  Tensor clone() const {
    Tensor t;
    t.shape = shape;
    t.data = std::make_shared<std::vector<float>>(*data);
    return t;
  }
};

}  // namespace xsda::nn
