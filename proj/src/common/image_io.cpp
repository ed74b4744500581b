#include "noisypairs/common/image_io.hpp"

#include <stdexcept>
#include <vector>

#include <opencv2/imgcodecs.hpp>

namespace noisypairs {

cv::Mat read_color(const std::filesystem::path& path) {
  cv::Mat image = cv::imread(path.string(), cv::IMREAD_COLOR);
  if (image.empty()) {
    throw std::runtime_error("cannot read image: " + path.string());
  }
  return image;
}

cv::Mat read_label(const std::filesystem::path& path) {
  cv::Mat label = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
  if (label.empty()) {
    throw std::runtime_error("cannot read label map: " + path.string());
  }
  if (label.type() != CV_8UC1) {
    throw std::runtime_error("label map is not 8-bit single channel: " + path.string());
  }
  return label;
}

void write_png(const std::filesystem::path& path, const cv::Mat& image) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  // Fixed compression settings keep the output byte-stable across runs.
  const std::vector<int> params{cv::IMWRITE_PNG_COMPRESSION, 3};
  if (!cv::imwrite(path.string(), image, params)) {
    throw std::runtime_error("cannot write image: " + path.string());
  }
}

bool identical(const cv::Mat& a, const cv::Mat& b) {
  if (a.type() != b.type() || a.size() != b.size()) return false;
  if (a.empty()) return true;
  cv::Mat diff;
  cv::compare(a.reshape(1), b.reshape(1), diff, cv::CMP_NE);
  return cv::countNonZero(diff) == 0;
}

}  // namespace noisypairs
