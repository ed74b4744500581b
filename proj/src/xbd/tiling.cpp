#include "noisypairs/xbd/tiling.hpp"

#include <stdexcept>

#include "noisypairs/xbd/polygon.hpp"

namespace noisypairs::xbd {

Noisiness classify(const cv::Mat& post_label) {
  cv::Mat damaged = post_label >= kMinorDamage;
  return cv::countNonZero(damaged) > 0 ? Noisiness::kNoisy : Noisiness::kClean;
}

std::array<TilePair, 4> tile(const SourcePair& source, int source_size) {
  const auto expect = [&](const cv::Mat& m, int type, const char* what) {
    if (m.empty()) throw std::invalid_argument(std::string(what) + " missing for " + source.name);
    if (m.rows != source_size || m.cols != source_size) {
      throw std::invalid_argument(std::string(what) + " of " + source.name + " is " + std::to_string(m.cols) +
                                  "x" + std::to_string(m.rows) + ", expected " + std::to_string(source_size) +
                                  "x" + std::to_string(source_size));
    }
    if (m.type() != type) throw std::invalid_argument(std::string(what) + " of " + source.name + " has the wrong type");
  };
  expect(source.pre_image, CV_8UC3, "pre image");
  expect(source.post_image, CV_8UC3, "post image");
  expect(source.pre_label, CV_8UC1, "pre label");
  expect(source.post_label, CV_8UC1, "post label");

  const int half = source_size / 2;
  std::array<TilePair, 4> tiles;
  for (int q = 0; q < 4; ++q) {
    const cv::Rect roi((q % 2) * half, (q / 2) * half, half, half);
    auto& t = tiles[q];
    t.id = source.name + "_q" + std::to_string(q);
    t.site = source.site;
    t.quadrant = q;
    t.pre_image = source.pre_image(roi).clone();
    t.post_image = source.post_image(roi).clone();
    t.pre_label = source.pre_label(roi).clone();
    t.post_label = source.post_label(roi).clone();
    t.noisiness = classify(t.post_label);
  }
  return tiles;
}

cv::Mat binarize_label(const cv::Mat& label) {
  if (label.type() != CV_8UC1) throw std::invalid_argument("label map must be 8-bit single channel");
  double max_value = 0.0;
  if (!label.empty()) cv::minMaxLoc(label, nullptr, &max_value);
  if (max_value > static_cast<int>(kDestroyed)) {
    throw std::invalid_argument("label value " + std::to_string(static_cast<int>(max_value)) + " outside [0, 4]");
  }
  cv::Mat out = label > 0;
  out /= 255;
  return out;
}

std::string site_of(const std::string& scene_name) {
  std::string stem = scene_name;
  for (const char* suffix : {"_pre_disaster", "_post_disaster"}) {
    const std::string s(suffix);
    if (stem.size() > s.size() && stem.compare(stem.size() - s.size(), s.size(), s) == 0) {
      stem.resize(stem.size() - s.size());
    }
  }
  const auto underscore = stem.rfind('_');
  return underscore == std::string::npos ? stem : stem.substr(0, underscore);
}

}  // namespace noisypairs::xbd
