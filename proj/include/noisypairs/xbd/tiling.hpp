#pragma once

#include <array>
#include <string>

#include <opencv2/core.hpp>

namespace noisypairs::xbd {

enum class Noisiness { kClean, kNoisy };

/// A full-size bi-temporal scene with rasterized class maps (0 background,
/// 1..4 damage grades).
struct SourcePair {
  std::string name;  // scene stem, e.g. "hurricane-harvey_00000012"
  std::string site;  // disaster identifier
  cv::Mat pre_image, post_image;
  cv::Mat pre_label, post_label;
};

struct TilePair {
  std::string id;  // "<scene>_q<k>"
  std::string site;
  int quadrant = 0;  // 0 top-left, 1 top-right, 2 bottom-left, 3 bottom-right
  cv::Mat pre_image, post_image;
  cv::Mat pre_label, post_label;
  Noisiness noisiness = Noisiness::kClean;
};

inline constexpr int kSourceSize = 1024;

/// A pair is noisy when its post-event label contains a damaged building
/// (grade ≥ 2). The pre-event label is not consulted.
Noisiness classify(const cv::Mat& post_label);

/// Cuts a source_size×source_size scene into four non-overlapping quadrants.
/// Throws std::invalid_argument when a label is missing or any dimension is off.
std::array<TilePair, 4> tile(const SourcePair& source, int source_size = kSourceSize);

/// 0 stays 0, grades 1..4 become 1 (building). Throws on values > 4.
cv::Mat binarize_label(const cv::Mat& label);

/// Parses "<site>_<number>_{pre,post}_disaster" style stems into the site part.
std::string site_of(const std::string& scene_name);

}  // namespace noisypairs::xbd
