#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <opencv2/core.hpp>

#include "noisypairs/vts/layout.hpp"

namespace noisypairs::vts {

/// A texture image together with the file it came from (for error messages
/// and manifests).
struct Texture {
  cv::Mat pixels;  // CV_8UC3
  std::string source;
};

struct ComposedImage {
  cv::Mat image;  // CV_8UC3, image_size²
  cv::Mat label;  // CV_8UC1, values {0, 1}
};

/// Fills every cell with the texture of its class. One random window of each
/// texture (chosen from `seed`) is shared by all cells of that class.
/// Throws std::invalid_argument naming the texture when it is smaller than the
/// image.
ComposedImage compose_image(const VoronoiLayout& layout, const Texture& class0, const Texture& class1,
                            std::uint64_t seed);

/// How replaced cells are labelled in the noisy label map.
enum class NoiseLabeling {
  kNoiseClass,  // replaced cells become class 2 (three-class downstream task)
  kIrrelevant,  // replaced cells keep their original class; the noise is not a downstream class
};

inline constexpr std::uint8_t kNoiseClass = 2;

struct VtsSample {
  cv::Mat clean_image;
  cv::Mat noisy_image;
  cv::Mat clean_label;  // {0, 1}
  cv::Mat noisy_label;  // {0, 1, 2}, or {0, 1} for irrelevant noise
  std::vector<int> replaced_cells;  // ascending
  double r_img = 0.0;
  std::uint64_t rng_seed = 0;
};

/// round-half-up(r_img · n_cells)
int replaced_cell_count(double r_img, int n_cells);

/// Overwrites round(r_img · n_cells) uniformly chosen cells (regardless of their
/// class) with a random window of the noise texture. Requires 0 ≤ r_img ≤ 1.
VtsSample inject_noise(const ComposedImage& clean, const VoronoiLayout& layout, const Texture& noise,
                       double r_img, std::uint64_t seed,
                       NoiseLabeling labeling = NoiseLabeling::kNoiseClass);

/// Returns human-readable violations of the sample invariants against its
/// layout (empty when the sample is consistent).
std::vector<std::string> check_sample(const VtsSample& sample, const VoronoiLayout& layout,
                                      NoiseLabeling labeling = NoiseLabeling::kNoiseClass);

}  // namespace noisypairs::vts
