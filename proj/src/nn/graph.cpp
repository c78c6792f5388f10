#include "xsda/nn/graph.hpp"

#include <algorithm>
#include <atomic>
#include <optional>
#include <unordered_map>
#include <unordered_set>

#include "xsda/nn/ops.hpp"

namespace xsda::nn {

namespace {
std::atomic<uint64_t> g_seq{1};
thread_local int g_no_grad_depth = 0;
}  // namespace

std::string shape_str(const Shape& s) {
  std::string out = "{";
  for (size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
  return out + "}";
}

NoGradGuard::NoGradGuard() { ++g_no_grad_depth; }
NoGradGuard::~NoGradGuard() { --g_no_grad_depth; }
bool grad_enabled() { return g_no_grad_depth == 0; }

Var Var::leaf(Tensor value, bool requires_grad) {
  auto n = std::make_shared<Node>();
  n->value = std::move(value);
  n->requires_grad = requires_grad && grad_enabled();
  n->seq = g_seq.fetch_add(1, std::memory_order_relaxed);
  return Var(std::move(n));
}

Var make_op(Tensor value, std::vector<Var> parents, BackwardFn backward) {
  auto n = std::make_shared<Node>();
  n->value = std::move(value);
  n->seq = g_seq.fetch_add(1, std::memory_order_relaxed);
  if (grad_enabled()) {
    for (const auto& p : parents) n->requires_grad = n->requires_grad || p.requires_grad();
    if (n->requires_grad) {
      n->parents = std::move(parents);
      n->backward = std::move(backward);
    }
  }
  return Var(std::move(n));
}

std::vector<Var> grad(const Var& output, const std::vector<Var>& wrt, bool create_graph, Var seed) {
  if (!seed.defined()) seed = constant(Tensor::full(output.shape(), 1.f));
  if (seed.shape() != output.shape())
    throw std::runtime_error("grad seed shape " + shape_str(seed.shape()) + " != output " +
                             shape_str(output.shape()));

  auto zeros_for = [&](const Var& w) { return constant(Tensor::zeros(w.shape())); };

  std::vector<Var> results;
  if (!output.requires_grad()) {
    for (const auto& w : wrt) results.push_back(zeros_for(w));
    return results;
  }

  // Reachable grad-requiring subgraph, then process in reverse creation order.
  std::vector<Var> order;
  {
    std::unordered_set<Node*> seen;
    std::vector<Var> stack{output};
    seen.insert(output.node());
    while (!stack.empty()) {
      Var v = stack.back();
      stack.pop_back();
      order.push_back(v);
      for (const auto& p : v.node()->parents)
        if (p.requires_grad() && seen.insert(p.node()).second) stack.push_back(p);
    }
    std::sort(order.begin(), order.end(),
              [](const Var& a, const Var& b) { return a.node()->seq > b.node()->seq; });
  }

  std::optional<NoGradGuard> guard;
  if (!create_graph) guard.emplace();

  std::unordered_map<Node*, Var> grads;
  grads[output.node()] = seed;
  for (const auto& v : order) {
    auto it = grads.find(v.node());
    if (it == grads.end() || !v.node()->backward) continue;
    const Var g = it->second;
    std::vector<Var> pg = v.node()->backward(g, v);
    const auto& parents = v.node()->parents;
    if (pg.size() != parents.size()) throw std::runtime_error("backward arity mismatch");
    for (size_t i = 0; i < parents.size(); ++i) {
      if (!parents[i].requires_grad() || !pg[i].defined()) continue;
      auto pit = grads.find(parents[i].node());
      if (pit == grads.end())
        grads.emplace(parents[i].node(), pg[i]);
      else
        pit->second = add(pit->second, pg[i]);
    }
  }

  for (const auto& w : wrt) {
    auto it = grads.find(w.node());
    results.push_back(it == grads.end() ? zeros_for(w) : it->second);
  }
  return results;
}

}  // namespace xsda::nn
