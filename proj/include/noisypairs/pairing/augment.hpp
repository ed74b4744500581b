#pragma once

#include <opencv2/core.hpp>

#include "noisypairs/common/json_io.hpp"
#include "noisypairs/common/rng.hpp"

namespace noisypairs::pairing {

/// Augmentation chain: random resized crop, flips, small rotation (one affine
/// warp), then colour jitter and Gaussian blur. Probabilities and ranges are
/// all configurable; identity() switches every step off.
struct AugmentConfig {
  int output_size = 0;  // 0 keeps the input size
  bool crop = true;
  double crop_min_scale = 0.8;  // fraction of the image area
  double crop_max_scale = 1.0;
  double crop_min_aspect = 3.0 / 4.0;
  double crop_max_aspect = 4.0 / 3.0;
  double hflip_prob = 0.5;
  double vflip_prob = 0.5;
  double max_rotation_deg = 10.0;
  double brightness = 0.2;  // multiplicative factor drawn from [1-b, 1+b]
  double contrast = 0.2;
  double saturation = 0.2;
  double hue = 0.0;  // shift drawn from [-h, h] of a full turn, h ≤ 0.5
  double grayscale_prob = 0.0;
  double blur_prob = 0.2;
  double blur_sigma_min = 0.1;
  double blur_sigma_max = 1.0;

  static AugmentConfig identity();
  Json to_json() const;
  static AugmentConfig from_json(const Json& json);
};

struct Augmented {
  cv::Mat image;  // CV_8UC3
  cv::Mat label;  // CV_8UC1, empty when no label was passed
  /// Maps output pixel coordinates (x, y, 1) to source coordinates.
  cv::Matx23d inverse;
};

/// Bilinear warp of an 8-bit image (any channel count) with edge replication.
/// `inverse` maps output pixel centres to source coordinates.
cv::Mat warp_bilinear(const cv::Mat& src, const cv::Matx23d& inverse, cv::Size size);

/// Nearest-neighbour counterpart for label maps: never invents a value.
cv::Mat warp_nearest(const cv::Mat& src, const cv::Matx23d& inverse, cv::Size size);

/// Draws the geometric part of the chain for a source of `size`.
cv::Matx23d sample_geometry(cv::Size size, int output_size, const AugmentConfig& config, Rng& rng);

/// Applies the chain. The label, if given, receives the same geometry with
/// nearest-neighbour sampling and no photometric change. Deterministic given
/// the rng state.
Augmented augment(const cv::Mat& image, const cv::Mat& label, const AugmentConfig& config, Rng& rng);

}  // namespace noisypairs::pairing
