#pragma once

#include <filesystem>

#include <opencv2/core.hpp>

namespace noisypairs {

/// Reads an 8-bit, 3-channel (BGR) image. Throws std::runtime_error on failure.
cv::Mat read_color(const std::filesystem::path& path);

/// Reads an 8-bit single-channel image (label maps). Throws on failure or if
/// the file is not single-channel.
cv::Mat read_label(const std::filesystem::path& path);

/// Writes PNG, creating parent directories. Throws on failure.
void write_png(const std::filesystem::path& path, const cv::Mat& image);

/// Bytewise equality of two matrices (type, size and content).
bool identical(const cv::Mat& a, const cv::Mat& b);

}  // namespace noisypairs
