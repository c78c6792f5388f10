#include "xsda/models/zoo.hpp"

namespace xsda::models {

using namespace nn;

GeneratorNet::GeneratorNet(Rng& rng)
    : s1_(4, 64, 3, 1, rng),
      s2_(64, 64, 3, 1, rng),
      s3_(64, 64, 3, 2, rng),
      s4_(64, 64, 3, 2, rng),
      b1_(64),
      b2_(64),
      b3_(64),
      b4_(64),
      final_(64, 4, 1, 1, 1, rng, /*zero_init=*/true) {}

Var GeneratorNet::forward(const Var& x, bool train) {
  Var h1 = b1_.forward(relu(s1_.forward(x)), train);
  h1 = b2_.forward(relu(s2_.forward(h1)), train);
  Var h2 = b3_.forward(relu(s3_.forward(h1)), train);
  h2 = b4_.forward(relu(s4_.forward(h2)), train);
  h2 = add(h2, h1);                  // residual between blocks
  return add(final_.forward(h2), x);  // identity-plus-correction
}

ParamList GeneratorNet::param_list() {
  ParamList out;
  s1_.collect(out, "s1");
  b1_.collect(out, "b1");
  s2_.collect(out, "s2");
  b2_.collect(out, "b2");
  s3_.collect(out, "s3");
  b3_.collect(out, "b3");
  s4_.collect(out, "s4");
  b4_.collect(out, "b4");
  final_.collect(out, "final");
  return out;
}

DiscriminatorNet::DiscriminatorNet(Rng& rng)
    : c1_(4, 8, 4, 2, 1, rng),
      c2_(8, 16, 4, 2, 1, rng),
      c3_(16, 32, 4, 2, 1, rng),
      c4_(32, 64, 4, 2, 1, rng),
      final_(64, 1, 1, 1, 1, rng),
      b1_(8),
      b2_(16),
      b3_(32),
      b4_(64) {}

Var DiscriminatorNet::score(const Var& x, bool train) {
  if (x.shape()[2] < 16 || x.shape()[3] < 16)
    throw std::runtime_error("discriminator input smaller than 16x16");
  Var h = b1_.forward(leaky_relu(c1_.forward(x), 0.2f), train);
  h = b2_.forward(leaky_relu(c2_.forward(h), 0.2f), train);
  h = b3_.forward(leaky_relu(c3_.forward(h), 0.2f), train);
  h = b4_.forward(leaky_relu(c4_.forward(h), 0.2f), train);
  return final_.forward(h);
}

Var DiscriminatorNet::forward(const Var& x, bool train) { return sigmoid(score(x, train)); }

ParamList DiscriminatorNet::param_list() {
  ParamList out;
  c1_.collect(out, "c1");
  b1_.collect(out, "b1");
  c2_.collect(out, "c2");
  b2_.collect(out, "b2");
  c3_.collect(out, "c3");
  b3_.collect(out, "b3");
  c4_.collect(out, "c4");
  b4_.collect(out, "b4");
  final_.collect(out, "final");
  return out;
}

CloudUNet::CloudUNet(Rng& rng)
    : e1a_(4, 32, 3, 1, rng),
      e1b_(32, 32, 3, 1, rng),
      e2a_(32, 64, 3, 1, rng),
      e2b_(64, 64, 3, 1, rng),
      ba_(64, 128, 3, 1, rng),
      bb_(128, 128, 3, 1, rng),
      d2a_(128, 64, 3, 1, rng),
      d2b_(64, 64, 3, 1, rng),
      d1a_(64, 32, 3, 1, rng),
      d1b_(32, 32, 3, 1, rng),
      be1a_(32),
      be1b_(32),
      be2a_(64),
      be2b_(64),
      bba_(128),
      bbb_(128),
      bu2_(64),
      bd2a_(64),
      bd2b_(64),
      bu1_(32),
      bd1a_(32),
      bd1b_(32),
      up2_(128, 64, 2, 1, 1, rng),
      up1_(64, 32, 2, 1, 1, rng),
      out_(32, 1, 1, 1, 1, rng) {}

Var CloudUNet::forward(const Var& x, bool train) {
  if (x.shape()[2] % 4 || x.shape()[3] % 4)
    throw std::runtime_error("cloud U-Net input dims must be divisible by 4, got " +
                             shape_str(x.shape()));
  Var e1 = be1a_.forward(relu(e1a_.forward(x)), train);
  e1 = be1b_.forward(relu(e1b_.forward(e1)), train);
  Var e2 = be2a_.forward(relu(e2a_.forward(max_pool2x2(e1))), train);
  e2 = be2b_.forward(relu(e2b_.forward(e2)), train);
  Var bt = bba_.forward(relu(ba_.forward(max_pool2x2(e2))), train);
  bt = bbb_.forward(relu(bb_.forward(bt)), train);

  Var u2 = bu2_.forward(relu(up2_.forward(upsample_nearest2x(bt))), train);
  Var d2 = bd2a_.forward(relu(d2a_.forward(concat_channels(u2, e2))), train);
  d2 = bd2b_.forward(relu(d2b_.forward(d2)), train);
  Var u1 = bu1_.forward(relu(up1_.forward(upsample_nearest2x(d2))), train);
  Var d1 = bd1a_.forward(relu(d1a_.forward(concat_channels(u1, e1))), train);
  d1 = bd1b_.forward(relu(d1b_.forward(d1)), train);
  return sigmoid(out_.forward(d1));
}

ParamList CloudUNet::param_list() {
  ParamList out;
  e1a_.collect(out, "e1a");
  be1a_.collect(out, "be1a");
  e1b_.collect(out, "e1b");
  be1b_.collect(out, "be1b");
  e2a_.collect(out, "e2a");
  be2a_.collect(out, "be2a");
  e2b_.collect(out, "e2b");
  be2b_.collect(out, "be2b");
  ba_.collect(out, "ba");
  bba_.collect(out, "bba");
  bb_.collect(out, "bb");
  bbb_.collect(out, "bbb");
  up2_.collect(out, "up2");
  bu2_.collect(out, "bu2");
  d2a_.collect(out, "d2a");
  bd2a_.collect(out, "bd2a");
  d2b_.collect(out, "d2b");
  bd2b_.collect(out, "bd2b");
  up1_.collect(out, "up1");
  bu1_.collect(out, "bu1");
  d1a_.collect(out, "d1a");
  bd1a_.collect(out, "bd1a");
  d1b_.collect(out, "d1b");
  bd1b_.collect(out, "bd1b");
  out_.collect(out, "out");
  return out;
}

int64_t count_params(const ParamList& params) {
  int64_t n = 0;
  for (const auto& [_, p] : params.params) n += p.numel();
  return n;
}

}  // namespace xsda::models
