#include "noisypairs/vts/compose.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "noisypairs/common/rng.hpp"

namespace noisypairs::vts {
namespace {

cv::Mat random_window(const Texture& texture, int size, Rng& rng) {
  if (texture.pixels.empty() || texture.pixels.type() != CV_8UC3) {
    throw std::invalid_argument("texture is not an 8-bit colour image: " + texture.source);
  }
  if (texture.pixels.cols < size || texture.pixels.rows < size) {
    throw std::invalid_argument("texture " + texture.source + " (" + std::to_string(texture.pixels.cols) + "x" +
                                std::to_string(texture.pixels.rows) + ") is smaller than the " +
                                std::to_string(size) + "x" + std::to_string(size) + " image");
  }
  std::uniform_int_distribution<int> x0(0, texture.pixels.cols - size);
  std::uniform_int_distribution<int> y0(0, texture.pixels.rows - size);
  const int x = x0(rng);
  const int y = y0(rng);
  return texture.pixels(cv::Rect(x, y, size, size));
}

}  // namespace

ComposedImage compose_image(const VoronoiLayout& layout, const Texture& class0, const Texture& class1,
                            std::uint64_t seed) {
  Rng rng(seed);
  const int size = layout.image_size;
  const cv::Mat window0 = random_window(class0, size, rng);
  const cv::Mat window1 = random_window(class1, size, rng);

  ComposedImage out{cv::Mat(size, size, CV_8UC3), layout.class_label()};
  for (int y = 0; y < size; ++y) {
    const auto* label = out.label.ptr<std::uint8_t>(y);
    const auto* row0 = window0.ptr<cv::Vec3b>(y);
    const auto* row1 = window1.ptr<cv::Vec3b>(y);
    auto* dst = out.image.ptr<cv::Vec3b>(y);
    for (int x = 0; x < size; ++x) dst[x] = label[x] == 0 ? row0[x] : row1[x];
  }
  return out;
}

int replaced_cell_count(double r_img, int n_cells) {
  // The small epsilon absorbs representation error (e.g. 0.35·20).
  return static_cast<int>(std::floor(r_img * n_cells + 0.5 + 1e-9));
}

VtsSample inject_noise(const ComposedImage& clean, const VoronoiLayout& layout, const Texture& noise,
                       double r_img, std::uint64_t seed, NoiseLabeling labeling) {
  if (!(r_img >= 0.0 && r_img <= 1.0)) {
    throw std::invalid_argument("r_img must lie in [0, 1], got " + std::to_string(r_img));
  }
  Rng rng(seed);
  const int size = layout.image_size;
  const cv::Mat window = random_window(noise, size, rng);

  std::vector<int> cells(layout.n_cells());
  std::iota(cells.begin(), cells.end(), 0);
  std::shuffle(cells.begin(), cells.end(), rng);
  cells.resize(replaced_cell_count(r_img, layout.n_cells()));
  std::sort(cells.begin(), cells.end());

  std::vector<bool> replaced(layout.n_cells(), false);
  for (int c : cells) replaced[c] = true;

  VtsSample sample{clean.image.clone(), clean.image.clone(), clean.label.clone(), clean.label.clone(),
                   cells, r_img, seed};
  for (int y = 0; y < size; ++y) {
    auto* dst = sample.noisy_image.ptr<cv::Vec3b>(y);
    auto* lbl = sample.noisy_label.ptr<std::uint8_t>(y);
    const auto* src = window.ptr<cv::Vec3b>(y);
    for (int x = 0; x < size; ++x) {
      if (!replaced[layout.cell_at(x, y)]) continue;
      dst[x] = src[x];
      if (labeling == NoiseLabeling::kNoiseClass) lbl[x] = kNoiseClass;
    }
  }
  return sample;
}

std::vector<std::string> check_sample(const VtsSample& sample, const VoronoiLayout& layout,
                                      NoiseLabeling labeling) {
  std::vector<std::string> problems;
  const int size = layout.image_size;
  const auto check_size = [&](const cv::Mat& m, int type, const char* what) {
    if (m.rows != size || m.cols != size || m.type() != type) {
      problems.push_back(std::string(what) + " has the wrong shape or type");
      return false;
    }
    return true;
  };
  if (!check_size(sample.clean_image, CV_8UC3, "clean_image") ||
      !check_size(sample.noisy_image, CV_8UC3, "noisy_image") ||
      !check_size(sample.clean_label, CV_8UC1, "clean_label") ||
      !check_size(sample.noisy_label, CV_8UC1, "noisy_label")) {
    return problems;
  }

  if (static_cast<int>(sample.replaced_cells.size()) != replaced_cell_count(sample.r_img, layout.n_cells())) {
    problems.push_back("replaced cell count does not equal round(r_img * n_cells)");
  }
  std::vector<bool> replaced(layout.n_cells(), false);
  for (int c : sample.replaced_cells) {
    if (c < 0 || c >= layout.n_cells() || replaced[c]) {
      problems.push_back("invalid or duplicate replaced cell " + std::to_string(c));
      continue;
    }
    replaced[c] = true;
  }

  long image_mismatch = 0, label_mismatch = 0, clean_label_mismatch = 0;
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const int cell = layout.cell_at(x, y);
      const auto clean_cls = sample.clean_label.at<std::uint8_t>(y, x);
      const auto noisy_cls = sample.noisy_label.at<std::uint8_t>(y, x);
      if (clean_cls != layout.class_of_cell[cell]) ++clean_label_mismatch;
      if (replaced[cell]) {
        const auto expected = labeling == NoiseLabeling::kNoiseClass ? kNoiseClass : clean_cls;
        if (noisy_cls != expected) ++label_mismatch;
      } else {
        if (sample.noisy_image.at<cv::Vec3b>(y, x) != sample.clean_image.at<cv::Vec3b>(y, x)) ++image_mismatch;
        if (noisy_cls != clean_cls) ++label_mismatch;
      }
    }
  }
  if (clean_label_mismatch > 0) problems.push_back("clean label disagrees with the layout's cell classes");
  if (image_mismatch > 0) problems.push_back("noisy image differs from clean image outside replaced cells");
  if (label_mismatch > 0) problems.push_back("noisy label inconsistent with replaced cells");
  return problems;
}

}  // namespace noisypairs::vts
