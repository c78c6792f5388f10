#include "xsda/models/spec.hpp"

#include <sstream>

#include "xsda/util/hash.hpp"

namespace xsda::models {

std::string NetworkSpec::to_string() const {
  std::ostringstream os;
  os << kind << "[in=" << input_channels << "]\n";
  for (const auto& l : layers) {
    os << l.op << " " << l.in_c << "->" << l.out_c << " k" << l.k << " s" << l.stride << " d"
       << l.dilation << " act=" << l.activation << (l.batch_norm ? " bn" : "")
       << (l.separable ? " sep" : "");
    if (!l.note.empty()) os << " (" << l.note << ")";
    os << "\n";
  }
  return os.str();
}

uint64_t NetworkSpec::hash() const { return util::fnv1a64(to_string()); }

NetworkSpec generator_spec() {
  NetworkSpec s{"GENERATOR", 4, {}};
  s.layers = {
      {"sep_conv", 4, 64, 3, 1, 1, "relu", true, true, "block1"},
      {"sep_conv", 64, 64, 3, 1, 1, "relu", true, true, "block1"},
      {"sep_conv", 64, 64, 3, 1, 2, "relu", true, true, "block2"},
      {"sep_conv", 64, 64, 3, 1, 2, "relu", true, true, "block2; skip from block1"},
      {"conv", 64, 4, 1, 1, 1, "none", false, false, "zero-init; skip from input"},
  };
  return s;
}

NetworkSpec discriminator_spec() {
  NetworkSpec s{"DISCRIMINATOR", 4, {}};
  s.layers = {
      {"conv", 4, 8, 4, 2, 1, "lrelu0.2", true, false, ""},
      {"conv", 8, 16, 4, 2, 1, "lrelu0.2", true, false, ""},
      {"conv", 16, 32, 4, 2, 1, "lrelu0.2", true, false, ""},
      {"conv", 32, 64, 4, 2, 1, "lrelu0.2", true, false, ""},
      {"conv", 64, 1, 1, 1, 1, "sigmoid", false, false, "probability map"},
  };
  return s;
}

NetworkSpec cloud_unet_spec() {
  NetworkSpec s{"CLOUD_UNET", 4, {}};
  s.layers = {
      {"sep_conv", 4, 32, 3, 1, 1, "relu", true, true, "enc1"},
      {"sep_conv", 32, 32, 3, 1, 1, "relu", true, true, "enc1"},
      {"maxpool", 32, 32, 2, 2, 1, "none", false, false, ""},
      {"sep_conv", 32, 64, 3, 1, 1, "relu", true, true, "enc2"},
      {"sep_conv", 64, 64, 3, 1, 1, "relu", true, true, "enc2"},
      {"maxpool", 64, 64, 2, 2, 1, "none", false, false, ""},
      {"sep_conv", 64, 128, 3, 1, 1, "relu", true, true, "bottleneck"},
      {"sep_conv", 128, 128, 3, 1, 1, "relu", true, true, "bottleneck"},
      {"upsample_conv", 128, 64, 2, 1, 1, "relu", true, false, "up2: nearest 2x, then 2x2 conv"},
      {"concat_skip", 64, 128, 0, 1, 1, "none", false, false, "skip from enc2"},
      {"sep_conv", 128, 64, 3, 1, 1, "relu", true, true, "dec2"},
      {"sep_conv", 64, 64, 3, 1, 1, "relu", true, true, "dec2"},
      {"upsample_conv", 64, 32, 2, 1, 1, "relu", true, false, "up1: nearest 2x, then 2x2 conv"},
      {"concat_skip", 32, 64, 0, 1, 1, "none", false, false, "skip from enc1"},
      {"sep_conv", 64, 32, 3, 1, 1, "relu", true, true, "dec1"},
      {"sep_conv", 32, 32, 3, 1, 1, "relu", true, true, "dec1"},
      {"conv", 32, 1, 1, 1, 1, "sigmoid", false, false, "cloud probability"},
  };
  return s;
}

}  // namespace xsda::models
