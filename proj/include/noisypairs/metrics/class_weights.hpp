#pragma once

#include <cstdint>
#include <vector>

#include <opencv2/core.hpp>

namespace noisypairs::metrics {

/// Pixel counts per class over CV_8UC1 label maps; values ≥ classes throw.
std::vector<std::int64_t> class_histogram(const std::vector<cv::Mat>& labels, int classes);

/// Weights proportional to 1 / frequency, scaled to mean 1. A class with no
/// pixels gets the largest finite weight and a warning.
std::vector<double> inverse_frequency_weights(const std::vector<std::int64_t>& counts);

}  // namespace noisypairs::metrics
