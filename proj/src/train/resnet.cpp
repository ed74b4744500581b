#include "noisypairs/train/resnet.hpp"

#include <stdexcept>

namespace noisypairs::train {
namespace F = torch::nn::functional;

Json EncoderConfig::to_json() const { return Json{{"base_width", base_width}, {"output_stride", output_stride}}; }

EncoderConfig EncoderConfig::from_json(const Json& j) {
  EncoderConfig c;
  c.base_width = j.value("base_width", c.base_width);
  c.output_stride = j.value("output_stride", c.output_stride);
  return c;
}

BasicBlockImpl::BasicBlockImpl(int in, int out, int stride, int dilation) {
  using torch::nn::Conv2dOptions;
  conv1 = register_module(
      "conv1", torch::nn::Conv2d(Conv2dOptions(in, out, 3).stride(stride).padding(dilation).dilation(dilation).bias(false)));
  bn1 = register_module("bn1", torch::nn::BatchNorm2d(out));
  conv2 = register_module(
      "conv2", torch::nn::Conv2d(Conv2dOptions(out, out, 3).padding(dilation).dilation(dilation).bias(false)));
  bn2 = register_module("bn2", torch::nn::BatchNorm2d(out));
  if (stride != 1 || in != out) {
    downsample = register_module("downsample", torch::nn::Sequential(
                                                   torch::nn::Conv2d(Conv2dOptions(in, out, 1).stride(stride).bias(false)),
                                                   torch::nn::BatchNorm2d(out)));
  }
}

torch::Tensor BasicBlockImpl::forward(const torch::Tensor& x) {
  auto y = torch::relu(bn1(conv1(x)));
  y = bn2(conv2(y));
  return torch::relu(y + (downsample ? downsample->forward(x) : x));
}

ResNet18Impl::ResNet18Impl(const EncoderConfig& c) : config(c) {
  if (c.output_stride != 8 && c.output_stride != 16 && c.output_stride != 32) {
    throw std::invalid_argument("output_stride must be 8, 16 or 32");
  }
  if (c.base_width < 1) throw std::invalid_argument("base_width must be positive");
  const int w = c.base_width;
  stem = register_module("stem", torch::nn::Conv2d(torch::nn::Conv2dOptions(3, w, 7).stride(2).padding(3).bias(false)));
  stem_bn = register_module("stem_bn", torch::nn::BatchNorm2d(w));

  // Stride so far after stem + max-pool: 4. Each later stage halves unless
  // the target stride is reached, after which it dilates instead.
  int stride = 4, dilation = 1;
  auto stage = [&](int in, int out, bool downsamples) {
    int s = 1, d = dilation;
    if (downsamples) {
      if (stride < c.output_stride) {
        s = 2;
        stride *= 2;
      } else {
        dilation *= 2;
        d = dilation;
      }
    }
    return torch::nn::Sequential(BasicBlock(in, out, s, downsamples && s == 1 ? d / 2 : d), BasicBlock(out, out, 1, d));
  };
  layer1 = register_module("layer1", stage(w, w, false));
  layer2 = register_module("layer2", stage(w, 2 * w, true));
  layer3 = register_module("layer3", stage(2 * w, 4 * w, true));
  layer4 = register_module("layer4", stage(4 * w, 8 * w, true));
}

torch::Tensor ResNet18Impl::forward(const torch::Tensor& x) {
  auto y = torch::relu(stem_bn(stem(x)));
  y = F::max_pool2d(y, F::MaxPool2dFuncOptions(3).stride(2).padding(1));
  return layer4->forward(layer3->forward(layer2->forward(layer1->forward(y))));
}

ProjectionHeadImpl::ProjectionHeadImpl(int in, int out) {
  fc1 = register_module("fc1", torch::nn::Linear(in, in));
  fc2 = register_module("fc2", torch::nn::Linear(in, out));
}

torch::Tensor ProjectionHeadImpl::forward(const torch::Tensor& feature_map) {
  auto pooled = feature_map.mean({2, 3});
  return F::normalize(fc2(torch::relu(fc1(pooled))), F::NormalizeFuncOptions().dim(1));
}

torch::Tensor extract_feature_map(ResNet18& encoder, const torch::Tensor& images, int expected_side) {
  auto f = encoder->forward(images);
  if (f.size(2) != expected_side || f.size(3) != expected_side) {
    throw std::runtime_error("encoder produced a " + std::to_string(f.size(2)) + "x" + std::to_string(f.size(3)) +
                             " grid, expected " + std::to_string(expected_side));
  }
  return F::normalize(f, F::NormalizeFuncOptions().dim(1).eps(1e-12));
}

void copy_weights(torch::nn::Module& dst, const torch::nn::Module& src) {
  torch::NoGradGuard guard;
  auto dp = dst.parameters(), sp = src.parameters();
  auto db = dst.buffers(), sb = src.buffers();
  if (dp.size() != sp.size() || db.size() != sb.size()) throw std::invalid_argument("module structures differ");
  for (std::size_t i = 0; i < dp.size(); ++i) dp[i].copy_(sp[i]);
  for (std::size_t i = 0; i < db.size(); ++i) db[i].copy_(sb[i]);
}

std::vector<torch::Tensor> snapshot(const torch::nn::Module& module) {
  std::vector<torch::Tensor> out;
  for (const auto& p : module.parameters()) out.push_back(p.detach().clone());
  for (const auto& b : module.buffers()) out.push_back(b.detach().clone());
  return out;
}

}  // namespace noisypairs::train
