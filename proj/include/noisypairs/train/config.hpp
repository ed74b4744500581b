#pragma once

#include <filesystem>

#include "noisypairs/common/json_io.hpp"
#include "noisypairs/train/finetune.hpp"
#include "noisypairs/train/pretrain.hpp"
#include "noisypairs/vts/dataset.hpp"

namespace noisypairs::train {

/// Everything a sweep cell needs besides its ConfigKey.
struct ExperimentSettings {
  /// Generated VTS datasets (one per r_img) and procedural textures are
  /// cached here.
  std::filesystem::path data_root;
  /// Texture images by class; empty means procedural textures.
  std::filesystem::path texture_dir;
  vts::GeneratorConfig generator;
  /// Output of `xbd ingest` (holds pretrain_manifest.json).
  std::filesystem::path xbd_dir;
  int xbd_input_size = 64;
  PretrainConfig pretrain;
  FinetuneConfig finetune;

  /// 64×64 VTS, 600 training images, 30 epochs, a narrow dilated encoder and a
  /// short MoCo queue; see README.
  static ExperimentSettings desk();
  Json to_json() const;
  static ExperimentSettings from_json(const Json& json);
};

}  // namespace noisypairs::train
