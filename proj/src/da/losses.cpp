#include "xsda/da/losses.hpp"

namespace xsda::da {

using namespace nn;

Var bce_real_fake(const Var& p_real, const Var& p_fake) {
  Var r = clamp(p_real, kProbEps, 1.f - kProbEps);
  Var f = clamp(p_fake, kProbEps, 1.f - kProbEps);
  return add(mean_all(neg(log_(r))), mean_all(neg(log_(add_scalar(neg(f), 1.f)))));
}

Var bce_fool(const Var& p_fake) {
  Var f = clamp(p_fake, kProbEps, 1.f - kProbEps);
  return mean_all(neg(log_(f)));
}

Var l1_mean(const Var& x, const Var& y) { return mean_all(abs_(sub(x, y))); }

Var bernoulli_kl_mean(const Var& p, const Var& q) {
  Var pc = clamp(p, kProbEps, 1.f - kProbEps);
  Var qc = clamp(q, kProbEps, 1.f - kProbEps);
  Var one_m_p = add_scalar(neg(pc), 1.f);
  Var one_m_q = add_scalar(neg(qc), 1.f);
  Var kl = add(mul(pc, sub(log_(pc), log_(qc))), mul(one_m_p, sub(log_(one_m_p), log_(one_m_q))));
  return mean_all(kl);
}

Var disc_loss(models::DiscriminatorNet& d, const Var& real, const Var& fake, bool train) {
  Var loss = bce_real_fake(d.forward(real, train), d.forward(fake.detach(), train));
  if (!std::isfinite(loss.val().item()))
    throw std::runtime_error("training divergence: non-finite discriminator loss");
  return loss;
}

Var gan_loss(models::DiscriminatorNet& d, const Var& fake, bool train) {
  Var loss = bce_fool(d.forward(fake, train));
  if (!std::isfinite(loss.val().item()))
    throw std::runtime_error("training divergence: non-finite adversarial loss");
  return loss;
}

Var identity_loss(models::GeneratorNet& g, const Var& batch, bool train) {
  return l1_mean(batch, g.forward(batch, train));
}

Var cycle_loss(models::GeneratorNet& g_ab, models::GeneratorNet& g_ba, const Var& batch_a,
               const Var& batch_b, bool train) {
  Var a_cyc = g_ba.forward(g_ab.forward(batch_a, train), train);
  Var b_cyc = g_ab.forward(g_ba.forward(batch_b, train), train);
  return add(l1_mean(batch_a, a_cyc), l1_mean(batch_b, b_cyc));
}

Var seg_consistency_loss(models::CloudUNet& f_frozen, const Var& x, const Var& gx) {
  Var p = f_frozen.forward(x.detach(), false).detach();
  Var q = f_frozen.forward(gx, false);
  Var loss = bernoulli_kl_mean(p, q);
  if (!std::isfinite(loss.val().item()))
    throw std::runtime_error("training divergence: non-finite segmentation consistency loss");
  return loss;
}

Var gradient_penalty(models::DiscriminatorNet& d, const Tensor& real_batch, bool pre_sigmoid,
                     bool train) {
  Var x = Var::leaf(real_batch, /*requires_grad=*/true);
  Var out = pre_sigmoid ? d.score(x, train) : d.forward(x, train);
  Var gx = grad(sum_all(out), {x}, /*create_graph=*/true)[0];
  const float inv_batch = 1.f / static_cast<float>(real_batch.shape[0]);
  return scale(sum_all(mul(gx, gx)), inv_batch);
}

void freeze(nn::ParamList& params) {
  for (auto& [_, p] : params.params) p.node()->requires_grad = false;
}

}  // namespace xsda::da
