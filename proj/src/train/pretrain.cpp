#include "noisypairs/train/pretrain.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>

#include "noisypairs/common/log.hpp"

#include "noisypairs/losses/moco.hpp"
#include "noisypairs/train/checkpoint.hpp"
#include "noisypairs/train/loss_functions.hpp"

namespace fs = std::filesystem;

namespace noisypairs::train {
namespace {

struct Batch {
  torch::Tensor a, b;
  torch::Tensor labels_a, labels_b;  // undefined for MoCo
};

Batch make_batch(const PairSource& source, const std::vector<pairing::PairPlan>& plan, std::size_t begin,
                 std::size_t end, bool dense, int d, Rng& rng) {
  std::vector<cv::Mat> a, b, la, lb;
  for (std::size_t i = begin; i < end; ++i) {
    auto p = source.make(plan[i], rng);
    a.push_back(std::move(p.image_a));
    b.push_back(std::move(p.image_b));
    if (dense) {
      la.push_back(std::move(p.label_a));
      lb.push_back(std::move(p.label_b));
    }
  }
  Batch batch{images_to_tensor(a), images_to_tensor(b), {}, {}};
  if (dense) {
    batch.labels_a = label_grids_to_tensor(la, d);
    batch.labels_b = label_grids_to_tensor(lb, d);
  }
  return batch;
}

// Query/key encoders, projection heads and the negative queue.
struct Moco {
  ResNet18 key_encoder;
  ProjectionHead query_head, key_head;
  losses::KeyQueue queue;

  Moco(const PretrainConfig& c, ResNet18& encoder, Rng& rng)
      : key_encoder(c.encoder),
        query_head(encoder->feature_dim(), c.projection_dim),
        key_head(encoder->feature_dim(), c.projection_dim),
        queue(c.moco_queue, c.projection_dim, rng) {
    copy_weights(*key_encoder, *encoder);
    copy_weights(*key_head, *query_head);
    for (auto& p : key_encoder->parameters()) p.set_requires_grad(false);
    for (auto& p : key_head->parameters()) p.set_requires_grad(false);
  }

  void momentum_step(ResNet18& encoder, double m) {
    torch::NoGradGuard guard;
    auto update = [m](torch::nn::Module& key, torch::nn::Module& query) {
      auto kp = key.parameters(), qp = query.parameters();
      for (std::size_t i = 0; i < kp.size(); ++i) {
        auto q = qp[i].detach().contiguous();
        losses::momentum_update({kp[i].data_ptr<float>(), static_cast<std::size_t>(kp[i].numel())},
                                {q.data_ptr<float>(), static_cast<std::size_t>(q.numel())}, m);
      }
    };
    update(*key_encoder, *encoder);
    update(*key_head, *query_head);
  }

  torch::Tensor negatives() const {
    const auto s = queue.storage();
    return torch::from_blob(const_cast<float*>(s.data()), {queue.capacity(), queue.dim()}, torch::kFloat32).clone();
  }

  torch::Tensor keys(const torch::Tensor& images) {
    torch::NoGradGuard guard;
    return key_head->forward(key_encoder->forward(images));
  }

  void enqueue(const torch::Tensor& keys) {
    auto k = keys.detach().contiguous();
    queue.enqueue({k.data_ptr<float>(), static_cast<std::size_t>(k.numel())});
  }
};

}  // namespace

Json PretrainConfig::to_json() const {
  return Json{{"loss", loss},
              {"encoder", encoder.to_json()},
              {"input_size", input_size},
              {"grid_side", grid_side},
              {"epochs", epochs},
              {"batch_size", batch_size},
              {"lr", lr},
              {"momentum", momentum},
              {"weight_decay", weight_decay},
              {"moco_temperature", moco_temperature},
              {"moco_queue", moco_queue},
              {"moco_momentum", moco_momentum},
              {"projection_dim", projection_dim},
              {"dense_temperature", dense_temperature},
              {"augment", augment.to_json()},
              {"seed", seed},
              {"log_pairs", log_pairs}};
}

PretrainConfig PretrainConfig::from_json(const Json& j) {
  PretrainConfig c;
  c.loss = j.value("loss", c.loss);
  if (j.contains("encoder")) c.encoder = EncoderConfig::from_json(j.at("encoder"));
  c.input_size = j.value("input_size", c.input_size);
  c.grid_side = j.value("grid_side", c.grid_side);
  c.epochs = j.value("epochs", c.epochs);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.lr = j.value("lr", c.lr);
  c.momentum = j.value("momentum", c.momentum);
  c.weight_decay = j.value("weight_decay", c.weight_decay);
  c.moco_temperature = j.value("moco_temperature", c.moco_temperature);
  c.moco_queue = j.value("moco_queue", c.moco_queue);
  c.moco_momentum = j.value("moco_momentum", c.moco_momentum);
  c.projection_dim = j.value("projection_dim", c.projection_dim);
  c.dense_temperature = j.value("dense_temperature", c.dense_temperature);
  if (j.contains("augment")) c.augment = pairing::AugmentConfig::from_json(j.at("augment"));
  c.seed = j.value("seed", c.seed);
  c.log_pairs = j.value("log_pairs", c.log_pairs);
  return c;
}

void PretrainConfig::validate() const {
  if (loss != "moco" && loss != "within_image" && loss != "cross_image") throw std::invalid_argument("unknown loss: " + loss);
  if (epochs < 1 || batch_size < 2) throw std::invalid_argument("need at least one epoch and batches of two");
  if (input_size % encoder.output_stride != 0 || input_size / encoder.output_stride != grid_side) {
    throw std::invalid_argument("input size " + std::to_string(input_size) + " at output stride " +
                                std::to_string(encoder.output_stride) + " does not give a " +
                                std::to_string(grid_side) + "x" + std::to_string(grid_side) + " grid");
  }
  if (!(moco_temperature > 0 && dense_temperature > 0)) throw std::invalid_argument("temperatures must be positive");
  if (!(moco_momentum >= 0 && moco_momentum < 1)) throw std::invalid_argument("moco momentum must lie in [0, 1)");
  if (moco_queue < 1) throw std::invalid_argument("moco queue must be non-empty");
}

PretrainResult pretrain(const PretrainConfig& c, const PairSource& train, const PairSource& val, const fs::path& out_dir) {
  c.validate();
  fs::create_directories(out_dir);
  torch::manual_seed(derive_seed(c.seed, streams::kTrain, 0));
  Rng init_rng = make_rng(c.seed, streams::kTrain, 1);

  const bool moco = c.loss == "moco";
  ResNet18 encoder(c.encoder);
  std::optional<Moco> state;
  std::vector<torch::Tensor> params = encoder->parameters();
  if (moco) {
    state.emplace(c, encoder, init_rng);
    for (auto& p : state->query_head->parameters()) params.push_back(p);
  }
  torch::optim::SGD optimizer(params,
                              torch::optim::SGDOptions(c.lr).momentum(c.momentum).weight_decay(c.weight_decay));

  const std::size_t per_epoch = (train.size() / c.batch_size) + (train.size() % c.batch_size >= 2 ? 1 : 0);
  const double total_steps = static_cast<double>(per_epoch) * c.epochs;
  const int d = c.grid_side;

  auto objective = [&](const Batch& batch, bool training) -> torch::Tensor {
    if (moco) {
      const auto q = state->query_head->forward(encoder->forward(batch.a));
      if (training) state->momentum_step(encoder, c.moco_momentum);
      const auto k = state->keys(batch.b);
      auto loss = info_nce_loss(q, k, state->negatives(), c.moco_temperature);
      if (training) state->enqueue(k);
      return loss;
    }
    const auto fa = extract_feature_map(encoder, batch.a, d);
    const auto fb = extract_feature_map(encoder, batch.b, d);
    return c.loss == "within_image"
               ? within_image_loss(fa, fb, batch.labels_a, batch.labels_b, c.dense_temperature)
               : cross_image_loss(fa, fb, batch.labels_a, batch.labels_b, c.dense_temperature);
  };

  // The validation draws are fixed once, so epochs are compared on the same pairs.
  Rng val_rng = make_rng(c.seed, streams::kValidation, 0);
  const auto val_plan = val.plan_epoch(val_rng);
  std::vector<Batch> val_batches;
  for (std::size_t i = 0; i + 1 < val_plan.size(); i += c.batch_size) {
    val_batches.push_back(make_batch(val, val_plan, i, std::min(val_plan.size(), i + c.batch_size), !moco, d, val_rng));
  }

  auto set_mode = [&](bool training) {
    encoder->train(training);
    if (moco) {
      state->query_head->train(training);
      state->key_encoder->train(training);
      state->key_head->train(training);
    }
  };

  std::ofstream log(out_dir / "train_log.csv");
  log << "step,loss,lr\n";
  std::ofstream epochs_csv(out_dir / "epochs.csv");
  epochs_csv << "epoch,train_loss,val_loss\n";

  PretrainResult result;
  result.checkpoint = out_dir / "encoder.pt";
  long step = 0;
  for (int epoch = 0; epoch < c.epochs; ++epoch) {
    Rng epoch_rng = make_rng(c.seed, streams::kPairing, static_cast<std::uint64_t>(epoch));
    Rng aug_rng = make_rng(c.seed, streams::kAugment, static_cast<std::uint64_t>(epoch));
    const auto plan = train.plan_epoch(epoch_rng);
    if (c.log_pairs) {
      std::vector<std::string> ids;
      for (std::size_t i = 0; i < train.size(); ++i) ids.push_back(train.id(i));
      pairing::append_pair_log(out_dir / "pairs.csv", epoch, plan, ids);
    }

    set_mode(true);
    double epoch_loss = 0.0;
    int batches = 0;
    for (std::size_t i = 0; i + 1 < plan.size(); i += c.batch_size) {
      const double lr = c.lr * 0.5 * (1.0 + std::cos(std::numbers::pi * step / total_steps));
      for (auto& group : optimizer.param_groups()) static_cast<torch::optim::SGDOptions&>(group.options()).lr(lr);
      const auto batch = make_batch(train, plan, i, std::min(plan.size(), i + c.batch_size), !moco, d, aug_rng);
      optimizer.zero_grad();
      auto loss = objective(batch, true);
      const double value = loss.item<double>();
      if (!std::isfinite(value)) {
        throw DivergenceError("non-finite training loss at epoch " + std::to_string(epoch) + ", step " +
                              std::to_string(step));
      }
      loss.backward();
      optimizer.step();
      log << step << ',' << value << ',' << lr << '\n';
      epoch_loss += value;
      ++batches;
      ++step;
    }
    epoch_loss /= std::max(1, batches);

    set_mode(false);
    double val_loss = 0.0;
    {
      torch::NoGradGuard guard;
      for (const auto& batch : val_batches) val_loss += objective(batch, false).item<double>();
    }
    val_loss /= std::max<std::size_t>(1, val_batches.size());
    result.train_loss.push_back(epoch_loss);
    result.val_loss.push_back(val_loss);
    epochs_csv << epoch << ',' << epoch_loss << ',' << val_loss << '\n';
    epochs_csv.flush();
    log.flush();
    log::info(log::format("pretrain %s: epoch %d/%d train %.4f val %.4f", c.loss.c_str(), epoch + 1, c.epochs,
                          epoch_loss, val_loss));

    if (std::isfinite(val_loss) && (result.best_epoch < 0 || val_loss < result.best_val_loss)) {
      result.best_epoch = epoch;
      result.best_val_loss = val_loss;
      save_checkpoint(result.checkpoint, encoder,
                      Json{{"config", c.to_json()}, {"epoch", epoch}, {"val_loss", val_loss}});
    }
  }
  if (result.best_epoch < 0) throw DivergenceError("validation loss never finite");
  return result;
}

}  // namespace noisypairs::train
