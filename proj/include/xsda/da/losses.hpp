#pragma once

#include "xsda/models/zoo.hpp"

namespace xsda::da {

using nn::Tensor;
using nn::Var;

/// Probabilities in BCE/KL terms are clamped to [eps, 1-eps].
inline constexpr float kProbEps = 1e-6f;

// --- probability-map level (all terms are means over batch, map, pixels) ---

/// mean(-log p_real) + mean(-log(1 - p_fake))
Var bce_real_fake(const Var& p_real, const Var& p_fake);
/// mean(-log p_fake)
Var bce_fool(const Var& p_fake);
/// mean |x - y| over all entries
Var l1_mean(const Var& x, const Var& y);
/// mean Bernoulli KL(p || q) = p log(p/q) + (1-p) log((1-p)/(1-q)); callers
/// detach p so gradients reach the generator only through q.
Var bernoulli_kl_mean(const Var& p, const Var& q);

// --- network level (training-time forms) ---

/// Discriminator BCE on a real batch vs a generated batch. The fake batch is
/// detached here: no gradient reaches the generator that produced it.
Var disc_loss(models::DiscriminatorNet& d, const Var& real, const Var& fake, bool train = true);

/// Generator adversarial term: fool the discriminator on generated samples.
Var gan_loss(models::DiscriminatorNet& d, const Var& fake, bool train = true);

/// mean L1 between a batch and its translation by g.
Var identity_loss(models::GeneratorNet& g, const Var& batch, bool train = true);

/// Both round-trip L1 terms: a -> g_ab -> g_ba and b -> g_ba -> g_ab.
Var cycle_loss(models::GeneratorNet& g_ab, models::GeneratorNet& g_ba, const Var& batch_a,
               const Var& batch_b, bool train = true);

/// KL between the frozen classifier's probabilities on x and on g(x). The
/// classifier runs in inference mode; p is detached.
Var seg_consistency_loss(models::CloudUNet& f_frozen, const Var& x, const Var& gx);

/// Mean over the batch of the squared L2 norm of d(score sum)/d(input) at the
/// real samples (0-centered penalty). pre_sigmoid selects the score convention.
Var gradient_penalty(models::DiscriminatorNet& d, const Tensor& real_batch,
                     bool pre_sigmoid = true, bool train = true);

/// Marks every parameter of a network non-trainable (frozen supervisor).
void freeze(nn::ParamList& params);

}  // namespace xsda::da
