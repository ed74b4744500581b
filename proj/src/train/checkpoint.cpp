#include "noisypairs/train/checkpoint.hpp"

#include <stdexcept>

namespace noisypairs::train {

void save_checkpoint(const std::filesystem::path& path, ResNet18& encoder, const Json& meta) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  torch::serialize::OutputArchive archive;
  encoder->save(archive);
  archive.write("meta", c10::IValue(meta.dump()));
  const auto tmp = path.string() + ".tmp";
  archive.save_to(tmp);
  std::filesystem::rename(tmp, path);
}

Json read_checkpoint_meta(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw std::runtime_error("checkpoint not found: " + path.string());
  torch::serialize::InputArchive archive;
  archive.load_from(path.string());
  c10::IValue meta;
  if (!archive.try_read("meta", meta)) throw std::runtime_error("checkpoint has no metadata: " + path.string());
  return Json::parse(meta.toStringRef());
}

ResNet18 load_encoder(const std::filesystem::path& path) {
  const auto meta = read_checkpoint_meta(path);
  ResNet18 encoder(EncoderConfig::from_json(meta.at("config").at("encoder")));
  torch::serialize::InputArchive archive;
  archive.load_from(path.string());
  encoder->load(archive);
  return encoder;
}

}  // namespace noisypairs::train
