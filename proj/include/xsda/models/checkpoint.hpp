#pragma once

#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "xsda/nn/layers.hpp"

namespace xsda::models {

/// Checkpoints live in a directory as <name>.json (kind, spec hash, step,
/// seed, config snapshot) plus <name>.bin holding the named float tensors
/// (parameters and batch-norm buffers), little-endian.
struct CheckpointMeta {
  std::string kind;
  uint64_t spec_hash = 0;
  int64_t step = 0;
  uint64_t seed = 0;
  nlohmann::json config;
  int version = 1;
};

void save_checkpoint(const std::string& dir, const std::string& name, const CheckpointMeta& meta,
                     nn::ParamList& items);

CheckpointMeta read_checkpoint_meta(const std::string& dir, const std::string& name);

/// Loads tensors into an already-built network; names, shapes, and the spec
/// hash must match. Returns the meta block.
CheckpointMeta load_checkpoint(const std::string& dir, const std::string& name,
                               uint64_t expect_spec_hash, nn::ParamList& items);

}  // namespace xsda::models
