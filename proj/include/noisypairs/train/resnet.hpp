#pragma once

#include <torch/torch.h>

#include "noisypairs/common/json_io.hpp"

namespace noisypairs::train {

struct EncoderConfig {
  int base_width = 64;     // channels of the first stage; stages use w, 2w, 4w, 8w
  int output_stride = 32;  // 32, 16 or 8; later stages switch to dilation
  Json to_json() const;
  static EncoderConfig from_json(const Json& json);
};

struct BasicBlockImpl : torch::nn::Module {
  BasicBlockImpl(int in, int out, int stride, int dilation);
  torch::Tensor forward(const torch::Tensor& x);

  torch::nn::Conv2d conv1{nullptr}, conv2{nullptr};
  torch::nn::BatchNorm2d bn1{nullptr}, bn2{nullptr};
  torch::nn::Sequential downsample{nullptr};
};
TORCH_MODULE(BasicBlock);

/// 18-layer residual network without the pooling/classifier tail: forward
/// returns the last stage's spatial feature map (B, 8w, H/s, W/s).
struct ResNet18Impl : torch::nn::Module {
  explicit ResNet18Impl(const EncoderConfig& config);
  torch::Tensor forward(const torch::Tensor& x);
  int feature_dim() const { return 8 * config.base_width; }

  EncoderConfig config;
  torch::nn::Conv2d stem{nullptr};
  torch::nn::BatchNorm2d stem_bn{nullptr};
  torch::nn::Sequential layer1{nullptr}, layer2{nullptr}, layer3{nullptr}, layer4{nullptr};
};
TORCH_MODULE(ResNet18);

/// Two-layer MLP on globally pooled features, output L2-normalized.
struct ProjectionHeadImpl : torch::nn::Module {
  ProjectionHeadImpl(int in, int out = 128);
  torch::Tensor forward(const torch::Tensor& feature_map);

  torch::nn::Linear fc1{nullptr}, fc2{nullptr};
};
TORCH_MODULE(ProjectionHead);

/// Per-position L2-normalized feature grid (B, C, d, d). Throws
/// std::runtime_error when the grid side differs from `expected_side`.
torch::Tensor extract_feature_map(ResNet18& encoder, const torch::Tensor& images, int expected_side);

/// Copies every parameter and buffer of `src` into `dst` (same architecture).
void copy_weights(torch::nn::Module& dst, const torch::nn::Module& src);

/// Concatenated copy of all parameters and buffers, for bitwise comparisons.
std::vector<torch::Tensor> snapshot(const torch::nn::Module& module);

}  // namespace noisypairs::train
