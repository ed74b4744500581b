#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "noisypairs/common/json_io.hpp"
#include "noisypairs/pairing/augment.hpp"
#include "noisypairs/train/data.hpp"
#include "noisypairs/train/resnet.hpp"

namespace noisypairs::train {

struct PretrainConfig {
  std::string loss = "moco";  // "moco", "within_image", "cross_image"
  EncoderConfig encoder;
  int input_size = 256;
  int grid_side = 8;
  int epochs = 30;
  int batch_size = 32;
  double lr = 0.03;
  double momentum = 0.9;
  double weight_decay = 1e-4;
  double moco_temperature = 0.2;
  int moco_queue = 4096;
  double moco_momentum = 0.999;
  int projection_dim = 128;
  double dense_temperature = 0.1;
  pairing::AugmentConfig augment;
  std::uint64_t seed = 0;
  bool log_pairs = false;  // writes pairs.csv in the output directory

  Json to_json() const;
  static PretrainConfig from_json(const Json& json);
  void validate() const;
};

struct PretrainResult {
  std::filesystem::path checkpoint;
  int best_epoch = -1;
  double best_val_loss = 0.0;
  std::vector<double> train_loss;  // per epoch
  std::vector<double> val_loss;    // per epoch
};

/// Raised when the training loss becomes non-finite. The best checkpoint
/// written so far stays on disk.
struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Trains the configured objective on `train` pairs, evaluates it on `val`
/// pairs (fixed draws every epoch) and keeps the encoder with the lowest
/// validation loss in `<out>/encoder.pt`. Writes `<out>/train_log.csv`
/// (step, loss, lr) and `<out>/epochs.csv`.
PretrainResult pretrain(const PretrainConfig& config, const PairSource& train, const PairSource& val,
                        const std::filesystem::path& out_dir);

}  // namespace noisypairs::train
