#include "noisypairs/metrics/class_weights.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include <spdlog/spdlog.h>

namespace noisypairs::metrics {

std::vector<std::int64_t> class_histogram(const std::vector<cv::Mat>& labels, int classes) {
  std::vector<std::int64_t> counts(classes, 0);
  for (const auto& label : labels) {
    if (label.type() != CV_8UC1) throw std::invalid_argument("expected CV_8UC1 label maps");
    for (int y = 0; y < label.rows; ++y) {
      const uchar* row = label.ptr<uchar>(y);
      for (int x = 0; x < label.cols; ++x) {
        if (row[x] >= classes) throw std::invalid_argument("label value " + std::to_string(row[x]) + " out of range");
        ++counts[row[x]];
      }
    }
  }
  return counts;
}

std::vector<double> inverse_frequency_weights(const std::vector<std::int64_t>& counts) {
  const auto total = std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
  if (counts.empty() || total == 0) throw std::invalid_argument("class histogram is empty");
  std::vector<double> w(counts.size(), 0.0);
  double max_weight = 0.0;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] > 0) {
      w[c] = static_cast<double>(total) / static_cast<double>(counts[c]);
      max_weight = std::max(max_weight, w[c]);
    }
  }
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] == 0) {
      spdlog::warn("class {} has no pixels in the finetuning set; weight clamped to the largest", c);
      w[c] = max_weight;
    }
  }
  const double mean = std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(w.size());
  for (auto& x : w) x /= mean;
  return w;
}

}  // namespace noisypairs::metrics
