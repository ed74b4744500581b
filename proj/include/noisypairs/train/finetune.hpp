#pragma once

#include <filesystem>
#include <map>
#include <vector>

#include "noisypairs/common/json_io.hpp"
#include "noisypairs/metrics/f1.hpp"
#include "noisypairs/train/data.hpp"
#include "noisypairs/train/resnet.hpp"

namespace noisypairs::train {

struct FinetuneConfig {
  int classes = 3;
  std::vector<int> macro_classes{0, 1, 2};
  int epochs = 30;
  int batch_size = 32;
  std::vector<double> lr_grid{1e-1, 1e-2, 1e-3};  // one entry disables the search
  double momentum = 0.9;
  double weight_decay = 0.0;
  std::uint64_t seed = 0;

  Json to_json() const;
  static FinetuneConfig from_json(const Json& json);
};

/// 1×1 convolution scoring each grid position, bilinearly upsampled.
struct SegmentationHeadImpl : torch::nn::Module {
  SegmentationHeadImpl(int in, int classes);
  torch::Tensor forward(const torch::Tensor& features, int output_size);
  torch::nn::Conv2d score{nullptr};
};
TORCH_MODULE(SegmentationHead);

/// Encoder features for a whole set, computed in inference mode.
torch::Tensor encode(ResNet18& encoder, const std::vector<cv::Mat>& images, int batch_size = 64);

struct FinetuneResult {
  metrics::F1Report test;
  double lr = 0.0;
  std::map<double, double> val_macro_f1;  // per candidate lr
  std::vector<double> class_weights;
  Json to_json() const;
};

/// Trains a segmentation head on top of the frozen encoder with inverse
/// class-frequency weighted cross-entropy, picks the lr with the best
/// validation macro F1 and reports test F1. Writes `<out>/metrics.json`.
FinetuneResult finetune(ResNet18& encoder, const SegmentationSet& train, const SegmentationSet& val,
                        const SegmentationSet& test, const FinetuneConfig& config,
                        const std::filesystem::path& out_dir);

}  // namespace noisypairs::train
