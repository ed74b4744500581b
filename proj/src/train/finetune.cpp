#include "noisypairs/train/finetune.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <optional>
#include <stdexcept>

#include "noisypairs/common/log.hpp"

#include "noisypairs/metrics/class_weights.hpp"

namespace noisypairs::train {
namespace F = torch::nn::functional;

Json FinetuneConfig::to_json() const {
  return Json{{"classes", classes},     {"macro_classes", macro_classes}, {"epochs", epochs},
              {"batch_size", batch_size}, {"lr_grid", lr_grid},           {"momentum", momentum},
              {"weight_decay", weight_decay}, {"seed", seed}};
}

FinetuneConfig FinetuneConfig::from_json(const Json& j) {
  FinetuneConfig c;
  c.classes = j.value("classes", c.classes);
  c.macro_classes = j.value("macro_classes", c.macro_classes);
  c.epochs = j.value("epochs", c.epochs);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.lr_grid = j.value("lr_grid", c.lr_grid);
  c.momentum = j.value("momentum", c.momentum);
  c.weight_decay = j.value("weight_decay", c.weight_decay);
  c.seed = j.value("seed", c.seed);
  return c;
}

Json FinetuneResult::to_json() const {
  Json grid = Json::object();
  for (const auto& [lr, f1] : val_macro_f1) grid[std::to_string(lr)] = f1;
  auto j = test.to_json();
  j["lr"] = lr;
  j["val_macro_f1_by_lr"] = grid;
  j["class_weights"] = class_weights;
  return j;
}

SegmentationHeadImpl::SegmentationHeadImpl(int in, int classes) {
  score = register_module("score", torch::nn::Conv2d(torch::nn::Conv2dOptions(in, classes, 1)));
}

torch::Tensor SegmentationHeadImpl::forward(const torch::Tensor& features, int output_size) {
  return F::interpolate(score(features), F::InterpolateFuncOptions()
                                             .size(std::vector<int64_t>{output_size, output_size})
                                             .mode(torch::kBilinear)
                                             .align_corners(false));
}

torch::Tensor encode(ResNet18& encoder, const std::vector<cv::Mat>& images, int batch_size) {
  torch::NoGradGuard guard;
  const bool was_training = encoder->is_training();
  encoder->eval();
  std::vector<torch::Tensor> parts;
  for (std::size_t i = 0; i < images.size(); i += batch_size) {
    std::vector<cv::Mat> chunk(images.begin() + i, images.begin() + std::min(images.size(), i + batch_size));
    parts.push_back(encoder->forward(images_to_tensor(chunk)));
  }
  encoder->train(was_training);
  return torch::cat(parts);
}

namespace {

metrics::ConfusionMatrix evaluate(SegmentationHead& head, const torch::Tensor& features,
                                  const std::vector<cv::Mat>& labels, int classes, int size) {
  torch::NoGradGuard guard;
  head->eval();
  metrics::ConfusionMatrix m(classes);
  for (long i = 0; i < features.size(0); i += 64) {
    const long end = std::min<long>(features.size(0), i + 64);
    const auto pred = head->forward(features.slice(0, i, end), size).argmax(1).to(torch::kUInt8).contiguous();
    for (long b = 0; b < end - i; ++b) {
      cv::Mat p(size, size, CV_8UC1, pred[b].data_ptr<uint8_t>());
      m.add(p, labels[i + b]);
    }
  }
  return m;
}

SegmentationHead train_head(const torch::Tensor& features, const torch::Tensor& targets, const torch::Tensor& weights,
                            const FinetuneConfig& c, double lr, int size) {
  torch::manual_seed(derive_seed(c.seed, streams::kTrain, 100));
  SegmentationHead head(static_cast<int>(features.size(1)), c.classes);
  torch::optim::SGD opt(head->parameters(),
                        torch::optim::SGDOptions(lr).momentum(c.momentum).weight_decay(c.weight_decay));
  const long n = features.size(0);
  const long per_epoch = (n + c.batch_size - 1) / c.batch_size;
  const double total = static_cast<double>(per_epoch) * c.epochs;
  Rng rng = make_rng(c.seed, streams::kTrain, 101);
  std::vector<long> order(n);
  std::iota(order.begin(), order.end(), 0L);
  long step = 0;
  head->train();
  for (int e = 0; e < c.epochs; ++e) {
    std::shuffle(order.begin(), order.end(), rng);
    for (long i = 0; i < n; i += c.batch_size) {
      const double step_lr = lr * 0.5 * (1.0 + std::cos(std::numbers::pi * step / total));
      for (auto& g : opt.param_groups()) static_cast<torch::optim::SGDOptions&>(g.options()).lr(step_lr);
      const auto idx = torch::tensor(std::vector<long>(order.begin() + i, order.begin() + std::min(n, i + c.batch_size)));
      const auto logits = head->forward(features.index_select(0, idx), size);
      const auto loss = F::cross_entropy(logits, targets.index_select(0, idx), F::CrossEntropyFuncOptions().weight(weights));
      if (!std::isfinite(loss.item<double>())) throw std::runtime_error("non-finite finetuning loss at lr " + std::to_string(lr));
      opt.zero_grad();
      loss.backward();
      opt.step();
      ++step;
    }
  }
  return head;
}

}  // namespace

FinetuneResult finetune(ResNet18& encoder, const SegmentationSet& train, const SegmentationSet& val,
                        const SegmentationSet& test, const FinetuneConfig& c, const std::filesystem::path& out_dir) {
  if (train.size() == 0 || test.size() == 0) throw std::invalid_argument("finetuning needs train and test images");
  if (c.lr_grid.empty()) throw std::invalid_argument("empty lr grid");
  const int size = train.images[0].rows;
  for (const auto* set : {&train, &val, &test}) {
    for (std::size_t i = 0; i < set->size(); ++i) {
      if (set->images[i].rows != size || set->images[i].cols != size || set->labels[i].size() != set->images[i].size()) {
        throw std::invalid_argument("finetuning images and labels must all be " + std::to_string(size) + "x" +
                                    std::to_string(size));
      }
    }
  }

  for (auto& p : encoder->parameters()) p.set_requires_grad(false);
  const auto train_f = encode(encoder, train.images);
  const auto test_f = encode(encoder, test.images);
  const auto val_f = val.size() > 0 ? encode(encoder, val.images) : torch::Tensor();

  FinetuneResult result;
  result.class_weights = metrics::inverse_frequency_weights(metrics::class_histogram(train.labels, c.classes));
  const auto weights = torch::tensor(result.class_weights, torch::kFloat64).to(torch::kFloat32);
  const auto targets = labels_to_tensor(train.labels);

  std::optional<SegmentationHead> best;
  double best_f1 = -1.0;
  for (double lr : c.lr_grid) {
    auto head = train_head(train_f, targets, weights, c, lr, size);
    double score = 0.0;
    if (c.lr_grid.size() > 1) {
      if (!val_f.defined()) throw std::invalid_argument("lr search needs a validation set");
      score = metrics::evaluate_f1(evaluate(head, val_f, val.labels, c.classes, size), c.macro_classes).macro_f1;
      result.val_macro_f1[lr] = score;
      log::info(log::format("finetune: lr %g val macro F1 %.4f", lr, score));
    }
    if (score > best_f1) {
      best_f1 = score;
      best = head;
      result.lr = lr;
    }
  }
  result.test = metrics::evaluate_f1(evaluate(*best, test_f, test.labels, c.classes, size), c.macro_classes);
  log::info(log::format("finetune: test macro F1 %.4f (lr %g)", result.test.macro_f1, result.lr));
  auto metrics = result.to_json();
  metrics["config"] = c.to_json();
  metrics["seed"] = c.seed;
  write_json_atomic(out_dir / "metrics.json", metrics);
  return result;
}

}  // namespace noisypairs::train
