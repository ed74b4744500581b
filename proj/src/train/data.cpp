#include "noisypairs/train/data.hpp"

#include <set>
#include <stdexcept>

#include <opencv2/imgproc.hpp>

#include "noisypairs/common/image_io.hpp"
#include "noisypairs/losses/label_grid.hpp"
#include "noisypairs/vts/dataset.hpp"
#include "noisypairs/xbd/tiling.hpp"

namespace noisypairs::train {

torch::Tensor images_to_tensor(const std::vector<cv::Mat>& images) {
  if (images.empty()) throw std::invalid_argument("empty image batch");
  const int H = images[0].rows, W = images[0].cols;
  auto out = torch::empty({static_cast<long>(images.size()), 3, H, W}, torch::kFloat32);
  auto acc = out.accessor<float, 4>();
  for (std::size_t b = 0; b < images.size(); ++b) {
    const auto& m = images[b];
    if (m.type() != CV_8UC3 || m.rows != H || m.cols != W) throw std::invalid_argument("inconsistent image batch");
    for (int y = 0; y < H; ++y) {
      const auto* row = m.ptr<cv::Vec3b>(y);
      for (int x = 0; x < W; ++x)
        for (int c = 0; c < 3; ++c) acc[b][c][y][x] = (row[x][c] / 255.0f - 0.5f) / 0.25f;
    }
  }
  return out;
}

torch::Tensor labels_to_tensor(const std::vector<cv::Mat>& labels) {
  if (labels.empty()) throw std::invalid_argument("empty label batch");
  const int H = labels[0].rows, W = labels[0].cols;
  auto out = torch::empty({static_cast<long>(labels.size()), H, W}, torch::kInt64);
  auto acc = out.accessor<std::int64_t, 3>();
  for (std::size_t b = 0; b < labels.size(); ++b) {
    if (labels[b].type() != CV_8UC1 || labels[b].rows != H || labels[b].cols != W) {
      throw std::invalid_argument("inconsistent label batch");
    }
    for (int y = 0; y < H; ++y)
      for (int x = 0; x < W; ++x) acc[b][y][x] = labels[b].at<uchar>(y, x);
  }
  return out;
}

torch::Tensor label_grids_to_tensor(const std::vector<cv::Mat>& labels, int d) {
  auto out = torch::empty({static_cast<long>(labels.size()), d, d}, torch::kInt64);
  auto acc = out.accessor<std::int64_t, 3>();
  for (std::size_t b = 0; b < labels.size(); ++b) {
    const auto& m = labels[b];
    if (!m.isContinuous()) throw std::invalid_argument("label map must be continuous");
    const auto grid = losses::downsample_label({m.rows, m.cols, {m.ptr<std::uint8_t>(), m.total()}}, d);
    for (int p = 0; p < d * d; ++p) acc[b][p / d][p % d] = grid.classes[p];
  }
  return out;
}

VtsData VtsData::load(const std::filesystem::path& root) {
  VtsData data;
  for (auto split : vts::kSplits) {
    for (const auto& dir : vts::list_samples(root, split)) {
      auto loaded = vts::load_sample(dir);
      if (split == vts::Split::kTrain) {
        data.train_ids.push_back(dir.filename().string());
        data.train.push_back(std::move(loaded.sample));
      } else {
        (split == vts::Split::kVal ? data.val : data.test).push_back(std::move(loaded.sample));
      }
    }
  }
  if (data.train.empty() || data.val.empty() || data.test.empty()) {
    throw std::runtime_error("dataset at " + root.string() + " is missing a split");
  }
  return data;
}

SegmentationSet VtsData::finetune_set() const {
  SegmentationSet s;
  for (const auto& x : train) {
    s.images.push_back(x.clean_image);
    s.labels.push_back(x.clean_label);
    s.images.push_back(x.noisy_image);
    s.labels.push_back(x.noisy_label);
  }
  return s;
}

SegmentationSet VtsData::validation_set() const {
  SegmentationSet s;
  for (const auto& x : val) {
    s.images.push_back(x.clean_image);
    s.labels.push_back(x.clean_label);
  }
  return s;
}

SegmentationSet VtsData::test_set() const {
  SegmentationSet s;
  for (const auto& x : test) {
    s.images.push_back(x.clean_image);
    s.labels.push_back(x.clean_label);
    s.images.push_back(x.noisy_image);
    s.labels.push_back(x.noisy_label);
  }
  return s;
}

VtsPairSource::VtsPairSource(const std::vector<vts::VtsSample>& samples, std::vector<std::string> ids, double r_pairs,
                             pairing::PairingMode mode, pairing::AugmentConfig augment, bool with_labels)
    : samples_(samples), ids_(std::move(ids)), r_pairs_(r_pairs), mode_(mode), augment_(augment),
      with_labels_(with_labels) {
  if (samples_.empty()) throw std::invalid_argument("no samples to pair");
  if (ids_.size() != samples_.size()) throw std::invalid_argument("one id per sample required");
}

std::vector<pairing::PairPlan> VtsPairSource::plan_epoch(Rng& rng) const {
  return pairing::plan_vts_epoch(samples_.size(), r_pairs_, mode_, rng);
}

pairing::ViewPair VtsPairSource::make(const pairing::PairPlan& plan, Rng& rng) const {
  return pairing::make_vts_pair(samples_[plan.index], plan.kind, augment_, rng, with_labels_);
}

XbdData XbdData::load(const std::filesystem::path& dir, int input_size, const xbd::PretrainManifest& manifest) {
  const cv::Size size(input_size, input_size);
  auto load = [&](const std::vector<xbd::PairEntry>& entries) {
    std::vector<XbdTile> out;
    for (const auto& e : entries) {
      XbdTile t;
      t.id = e.id;
      t.noisy = e.noisy;
      cv::resize(read_color(dir / e.pre_image), t.pre, size, 0, 0, cv::INTER_AREA);
      cv::resize(read_color(dir / e.post_image), t.post, size, 0, 0, cv::INTER_AREA);
      cv::resize(xbd::binarize_label(read_label(dir / e.pre_label)), t.building, size, 0, 0, cv::INTER_NEAREST);
      cv::resize(read_label(dir / e.post_label), t.post_label, size, 0, 0, cv::INTER_NEAREST);
      out.push_back(std::move(t));
    }
    return out;
  };
  XbdData data;
  data.train = load(manifest.train);
  data.val = load(manifest.val);
  data.test = load(manifest.test);
  for (std::size_t i = 0; i < data.val.size(); ++i)
    if (!data.val[i].noisy) data.clean_val.push_back(i);
  std::set<std::string> chosen(manifest.clean_pairs.begin(), manifest.clean_pairs.end());
  chosen.insert(manifest.noisy_pairs.begin(), manifest.noisy_pairs.end());
  for (std::size_t i = 0; i < data.train.size(); ++i)
    if (chosen.count(data.train[i].id)) data.pretrain.push_back(i);
  return data;
}

SegmentationSet XbdData::post_event(const std::vector<XbdTile>& tiles) {
  SegmentationSet s;
  for (const auto& t : tiles) {
    s.images.push_back(t.post);
    s.labels.push_back(t.post_label);
  }
  return s;
}

XbdPairSource::XbdPairSource(const std::vector<XbdTile>& tiles, std::vector<std::size_t> subset,
                             pairing::PairingMode mode, pairing::AugmentConfig augment, bool with_labels)
    : tiles_(tiles), subset_(std::move(subset)), mode_(mode), augment_(augment), with_labels_(with_labels) {
  if (subset_.empty()) throw std::invalid_argument("empty pretraining manifest");
}

std::vector<pairing::PairPlan> XbdPairSource::plan_epoch(Rng& rng) const {
  std::vector<bool> noisy;
  for (auto i : subset_) noisy.push_back(tiles_[i].noisy);
  return pairing::plan_xbd_epoch(noisy, mode_, rng);
}

pairing::ViewPair XbdPairSource::make(const pairing::PairPlan& plan, Rng& rng) const {
  const auto& t = tiles_[subset_[plan.index]];
  return pairing::make_xbd_pair(t.pre, t.post, with_labels_ ? t.building : cv::Mat(), plan.kind, augment_, rng);
}

}  // namespace noisypairs::train
