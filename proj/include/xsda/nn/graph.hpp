#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "xsda/nn/tensor.hpp"

namespace xsda::nn {

class Var;
struct Node;

/// Maps the gradient at this node to gradients at its parents. Backward
/// functions are written in terms of graph ops themselves, so differentiating
/// a gradient (e.g. for the R1 penalty) reuses the same machinery.
using BackwardFn = std::function<std::vector<Var>(const Var& grad, const Var& self)>;

struct Node {
  Tensor value;
  bool requires_grad = false;
  uint64_t seq = 0;  // creation order; parents always precede children
  std::vector<Var> parents;
  BackwardFn backward;
};

/// Handle to a node in the eager compute graph.
class Var {
 public:
  Var() = default;
  explicit Var(std::shared_ptr<Node> n) : n_(std::move(n)) {}

  static Var leaf(Tensor value, bool requires_grad);

  bool defined() const { return n_ != nullptr; }
  const Tensor& val() const { return n_->value; }
  const Shape& shape() const { return n_->value.shape; }
  int64_t numel() const { return n_->value.numel(); }
  bool requires_grad() const { return n_ && n_->requires_grad; }
  Node* node() const { return n_.get(); }
  std::shared_ptr<Node> node_ptr() const { return n_; }

  /// Same value, severed from the graph.
  Var detach() const { return leaf(n_->value, false); }

 private:
  std::shared_ptr<Node> n_;
};

/// Builds an op node; requires_grad is inherited from parents unless grad
/// recording is disabled, in which case the node is a constant.
Var make_op(Tensor value, std::vector<Var> parents, BackwardFn backward);

/// Grad-recording switch (RAII). With recording off, ops compute values only.
struct NoGradGuard {
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
};
bool grad_enabled();

/// Reverse-mode gradients of `output` w.r.t. each of `wrt`. With create_graph
/// the returned gradients carry their own graphs and can be differentiated
/// again. `seed` defaults to ones (output is normally a scalar loss).
/// Unreachable wrt entries come back as zeros.
std::vector<Var> grad(const Var& output, const std::vector<Var>& wrt, bool create_graph = false,
                      Var seed = {});

}  // namespace xsda::nn
