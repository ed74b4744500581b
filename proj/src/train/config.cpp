#include "noisypairs/train/config.hpp"

namespace noisypairs::train {

ExperimentSettings ExperimentSettings::desk() {
  ExperimentSettings s;
  s.data_root = "data";
  s.generator = vts::GeneratorConfig::desk_scale();
  s.pretrain.encoder.base_width = 16;
  s.pretrain.encoder.output_stride = 8;
  s.pretrain.input_size = 64;
  s.pretrain.grid_side = 8;
  s.pretrain.epochs = 30;
  s.pretrain.batch_size = 32;
  s.pretrain.lr = 0.1;
  s.pretrain.moco_queue = 256;
  s.pretrain.moco_momentum = 0.9;
  auto& a = s.pretrain.augment;
  a.brightness = a.contrast = a.saturation = 0.4;
  a.hue = 0.1;
  a.grayscale_prob = 0.2;
  s.finetune.epochs = 20;
  return s;
}

Json ExperimentSettings::to_json() const {
  return Json{{"data_root", data_root.string()},
              {"texture_dir", texture_dir.string()},
              {"generator", generator.to_json()},
              {"xbd_dir", xbd_dir.string()},
              {"xbd_input_size", xbd_input_size},
              {"pretrain", pretrain.to_json()},
              {"finetune", finetune.to_json()}};
}

ExperimentSettings ExperimentSettings::from_json(const Json& j) {
  auto s = desk();
  s.data_root = j.value("data_root", s.data_root.string());
  s.texture_dir = j.value("texture_dir", s.texture_dir.string());
  if (j.contains("generator")) s.generator = vts::GeneratorConfig::from_json(j.at("generator"));
  s.xbd_dir = j.value("xbd_dir", s.xbd_dir.string());
  s.xbd_input_size = j.value("xbd_input_size", s.xbd_input_size);
  if (j.contains("pretrain")) s.pretrain = PretrainConfig::from_json(j.at("pretrain"));
  if (j.contains("finetune")) s.finetune = FinetuneConfig::from_json(j.at("finetune"));
  return s;
}

}  // namespace noisypairs::train
