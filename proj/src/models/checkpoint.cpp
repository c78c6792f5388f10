#include "xsda/models/checkpoint.hpp"

#include <filesystem>
#include <fstream>

namespace xsda::models {

namespace {

constexpr uint32_t kMagic = 0x58534431;  // "XSD1"

void write_u32(std::ostream& os, uint32_t v) { os.write(reinterpret_cast<const char*>(&v), 4); }
void write_u64(std::ostream& os, uint64_t v) { os.write(reinterpret_cast<const char*>(&v), 8); }
uint32_t read_u32(std::istream& is) {
  uint32_t v = 0;
  is.read(reinterpret_cast<char*>(&v), 4);
  return v;
}
uint64_t read_u64(std::istream& is) {
  uint64_t v = 0;
  is.read(reinterpret_cast<char*>(&v), 8);
  return v;
}

void write_tensor(std::ostream& os, const std::string& name, const nn::Tensor& t) {
  write_u32(os, static_cast<uint32_t>(name.size()));
  os.write(name.data(), static_cast<std::streamsize>(name.size()));
  write_u32(os, static_cast<uint32_t>(t.shape.size()));
  for (int64_t d : t.shape) write_u64(os, static_cast<uint64_t>(d));
  os.write(reinterpret_cast<const char*>(t.ptr()), t.numel() * 4);
}

std::pair<std::string, nn::Tensor> read_tensor(std::istream& is) {
  const uint32_t name_len = read_u32(is);
  std::string name(name_len, '\0');
  is.read(name.data(), name_len);
  const uint32_t ndim = read_u32(is);
  nn::Shape shape(ndim);
  for (auto& d : shape) d = static_cast<int64_t>(read_u64(is));
  nn::Tensor t(shape);
  is.read(reinterpret_cast<char*>(t.ptr()), t.numel() * 4);
  return {std::move(name), std::move(t)};
}

}  // namespace

void save_checkpoint(const std::string& dir, const std::string& name, const CheckpointMeta& meta,
                     nn::ParamList& items) {
  std::filesystem::create_directories(dir);
  {
    nlohmann::json j{{"kind", meta.kind},     {"spec_hash", meta.spec_hash}, {"step", meta.step},
                     {"seed", meta.seed},     {"config", meta.config},       {"version", meta.version}};
    std::ofstream f(dir + "/" + name + ".json");
    f << j.dump(2) << "\n";
  }
  std::ofstream f(dir + "/" + name + ".bin", std::ios::binary);
  if (!f) throw std::runtime_error("cannot write checkpoint: " + dir + "/" + name + ".bin");
  write_u32(f, kMagic);
  write_u32(f, static_cast<uint32_t>(items.params.size() + items.buffers.size()));
  for (const auto& [n, v] : items.params) write_tensor(f, n, v.val());
  for (const auto& [n, t] : items.buffers) write_tensor(f, n, *t);
  if (!f) throw std::runtime_error("checkpoint write failed: " + dir);
}

CheckpointMeta read_checkpoint_meta(const std::string& dir, const std::string& name) {
  const std::string path = dir + "/" + name + ".json";
  std::ifstream f(path);
  if (!f) throw std::runtime_error("missing checkpoint meta: " + path);
  nlohmann::json j = nlohmann::json::parse(f);
  CheckpointMeta m;
  m.kind = j.at("kind").get<std::string>();
  m.spec_hash = j.at("spec_hash").get<uint64_t>();
  m.step = j.at("step").get<int64_t>();
  m.seed = j.at("seed").get<uint64_t>();
  m.config = j.value("config", nlohmann::json::object());
  m.version = j.value("version", 1);
  return m;
}

CheckpointMeta load_checkpoint(const std::string& dir, const std::string& name,
                               uint64_t expect_spec_hash, nn::ParamList& items) {
  const CheckpointMeta meta = read_checkpoint_meta(dir, name);
  if (meta.spec_hash != expect_spec_hash)
    throw std::runtime_error("checkpoint " + name + " spec hash mismatch (corrupt or wrong kind)");

  const std::string path = dir + "/" + name + ".bin";
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("missing checkpoint blob: " + path);
  if (read_u32(f) != kMagic) throw std::runtime_error("corrupt checkpoint: " + path);
  const uint32_t count = read_u32(f);
  std::map<std::string, nn::Tensor> loaded;
  for (uint32_t i = 0; i < count; ++i) {
    auto [n, t] = read_tensor(f);
    loaded.emplace(std::move(n), std::move(t));
  }
  if (!f) throw std::runtime_error("corrupt checkpoint: " + path);

  auto assign = [&](const std::string& n, nn::Tensor& dst) {
    auto it = loaded.find(n);
    if (it == loaded.end()) throw std::runtime_error("checkpoint missing tensor " + n);
    if (it->second.shape != dst.shape)
      throw std::runtime_error("checkpoint tensor " + n + " shape mismatch");
    dst = it->second.clone();
  };
  for (auto& [n, v] : items.params) assign(n, v.node()->value);
  for (auto& [n, t] : items.buffers) assign(n, *t);
  return meta;
}

}  // namespace xsda::models
