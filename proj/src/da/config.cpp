#include "xsda/da/config.hpp"

#include <stdexcept>

namespace xsda::da {

DAConfig DAConfig::preset(const std::string& name) {
  DAConfig c;
  if (name == "full-da") return c;
  if (name == "no-id") {
    c.lambda_id = 0;
    return c;
  }
  if (name == "no-seg") {
    c.lambda_seg = 0;
    return c;
  }
  if (name == "no-cyc-seg") {
    c.lambda_cyc = 0;
    c.lambda_seg = 0;
    return c;
  }
  if (name == "no-seg-id") {
    c.lambda_seg = 0;
    c.lambda_id = 0;
    return c;
  }
  if (name == "gan-only") {
    c.lambda_id = 0;
    c.lambda_cyc = 0;
    c.lambda_seg = 0;
    return c;
  }
  if (name == "identity-only") {
    c.lambda_gan = 0;
    c.lambda_id = 100;
    c.lambda_cyc = 0;
    c.lambda_seg = 0;
    return c;
  }
  throw std::runtime_error("unknown preset: " + name);
}

DAConfig DAConfig::from_json(const nlohmann::json& j) {
  DAConfig c;
  if (j.contains("preset")) c = preset(j.at("preset").get<std::string>());
  for (const auto& [key, val] : j.items()) {
    if (key == "preset")
      ;
    else if (key == "lambda_gan")
      c.lambda_gan = val.get<float>();
    else if (key == "lambda_id")
      c.lambda_id = val.get<float>();
    else if (key == "lambda_cyc")
      c.lambda_cyc = val.get<float>();
    else if (key == "lambda_seg")
      c.lambda_seg = val.get<float>();
    else if (key == "gp_weight")
      c.gp_weight = val.get<float>();
    else if (key == "learning_rate")
      c.learning_rate = val.get<float>();
    else if (key == "batch_size")
      c.batch_size = val.get<int>();
    else if (key == "steps")
      c.steps = val.get<int>();
    else if (key == "epochs")
      c.epochs = val.get<int>();
    else if (key == "patch_size")
      c.patch_size = val.get<int>();
    else if (key == "seed")
      c.seed = val.get<uint64_t>();
    else if (key == "aug_rot90")
      c.aug_rot90 = val.get<bool>();
    else if (key == "aug_flip_h")
      c.aug_flip_h = val.get<bool>();
    else if (key == "aug_flip_v")
      c.aug_flip_v = val.get<bool>();
    else if (key == "classifier_checkpoint")
      c.classifier_checkpoint = val.get<std::string>();
    else if (key == "classifier_name")
      c.classifier_name = val.get<std::string>();
    else if (key == "checkpoint_every")
      c.checkpoint_every = val.get<int>();
    else
      throw std::runtime_error("unknown config key: " + key);
  }
  if (c.lambda_gan < 0 || c.lambda_id < 0 || c.lambda_cyc < 0 || c.lambda_seg < 0 ||
      c.gp_weight < 0)
    throw std::runtime_error("loss weights must be nonnegative");
  if (c.batch_size < 1 || c.patch_size < 8) throw std::runtime_error("bad batch or patch size");
  return c;
}

nlohmann::json DAConfig::to_json() const {
  return nlohmann::json{{"lambda_gan", lambda_gan},
                        {"lambda_id", lambda_id},
                        {"lambda_cyc", lambda_cyc},
                        {"lambda_seg", lambda_seg},
                        {"gp_weight", gp_weight},
                        {"learning_rate", learning_rate},
                        {"batch_size", batch_size},
                        {"steps", steps},
                        {"epochs", epochs},
                        {"patch_size", patch_size},
                        {"seed", seed},
                        {"aug_rot90", aug_rot90},
                        {"aug_flip_h", aug_flip_h},
                        {"aug_flip_v", aug_flip_v},
                        {"classifier_checkpoint", classifier_checkpoint},
                        {"classifier_name", classifier_name},
                        {"checkpoint_every", checkpoint_every}};
}

}  // namespace xsda::da
