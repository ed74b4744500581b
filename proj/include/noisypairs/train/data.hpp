#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <opencv2/core.hpp>
#include <torch/torch.h>

#include "noisypairs/pairing/sampler.hpp"
#include "noisypairs/vts/compose.hpp"
#include "noisypairs/xbd/ingest.hpp"

namespace noisypairs::train {

/// (B, 3, H, W) float from 8-bit BGR images, scaled to roughly zero mean.
torch::Tensor images_to_tensor(const std::vector<cv::Mat>& images);

/// (B, H, W) int64 class maps.
torch::Tensor labels_to_tensor(const std::vector<cv::Mat>& labels);

/// (B, d, d) int64 block-majority grids.
torch::Tensor label_grids_to_tensor(const std::vector<cv::Mat>& labels, int d);

/// Pretraining pairs, drawn one epoch at a time.
class PairSource {
 public:
  virtual ~PairSource() = default;
  virtual std::size_t size() const = 0;
  virtual std::vector<pairing::PairPlan> plan_epoch(Rng& rng) const = 0;
  virtual pairing::ViewPair make(const pairing::PairPlan& plan, Rng& rng) const = 0;
  virtual std::string id(std::size_t index) const = 0;
};

struct SegmentationSet {
  std::vector<cv::Mat> images;
  std::vector<cv::Mat> labels;
  std::size_t size() const { return images.size(); }
};

struct VtsData {
  std::vector<std::string> train_ids;
  std::vector<vts::VtsSample> train, val, test;

  static VtsData load(const std::filesystem::path& root);

  /// Clean and noisy training images with their labels (three classes).
  SegmentationSet finetune_set() const;
  SegmentationSet validation_set() const;
  /// Clean and noisy test images.
  SegmentationSet test_set() const;
};

class VtsPairSource : public PairSource {
 public:
  VtsPairSource(const std::vector<vts::VtsSample>& samples, std::vector<std::string> ids, double r_pairs,
                pairing::PairingMode mode, pairing::AugmentConfig augment, bool with_labels);
  std::size_t size() const override { return samples_.size(); }
  std::vector<pairing::PairPlan> plan_epoch(Rng& rng) const override;
  pairing::ViewPair make(const pairing::PairPlan& plan, Rng& rng) const override;
  std::string id(std::size_t index) const override { return ids_[index]; }

 private:
  const std::vector<vts::VtsSample>& samples_;
  std::vector<std::string> ids_;
  double r_pairs_;
  pairing::PairingMode mode_;
  pairing::AugmentConfig augment_;
  bool with_labels_;
};

struct XbdTile {
  std::string id;
  bool noisy = false;
  cv::Mat pre, post;
  cv::Mat building;    // binarized pre-event label, shared by both views
  cv::Mat post_label;  // damage grades 0..4
};

struct XbdData {
  std::vector<XbdTile> train, val, test;
  std::vector<std::size_t> pretrain;   // indices into train, the undersampled subset
  std::vector<std::size_t> clean_val;  // indices into val; pretraining validation is noise-free

  /// Loads tiles listed in `<dir>/pretrain_manifest.json`, resized to
  /// input_size (area interpolation for images, nearest for labels).
  static XbdData load(const std::filesystem::path& dir, int input_size, const xbd::PretrainManifest& manifest);

  /// Post-event images with damage grades, for finetuning and testing.
  static SegmentationSet post_event(const std::vector<XbdTile>& tiles);
};

class XbdPairSource : public PairSource {
 public:
  XbdPairSource(const std::vector<XbdTile>& tiles, std::vector<std::size_t> subset, pairing::PairingMode mode,
                pairing::AugmentConfig augment, bool with_labels);
  std::size_t size() const override { return subset_.size(); }
  std::vector<pairing::PairPlan> plan_epoch(Rng& rng) const override;
  pairing::ViewPair make(const pairing::PairPlan& plan, Rng& rng) const override;
  std::string id(std::size_t index) const override { return tiles_[subset_[index]].id; }

 private:
  const std::vector<XbdTile>& tiles_;
  std::vector<std::size_t> subset_;
  pairing::PairingMode mode_;
  pairing::AugmentConfig augment_;
  bool with_labels_;
};

}  // namespace noisypairs::train
