#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <opencv2/core.hpp>

#include "noisypairs/common/json_io.hpp"

namespace noisypairs::metrics {

/// Pixel confusion matrix, counts[label][prediction].
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(int classes);

  /// Accumulates one CV_8UC1 prediction/label pair. Values outside
  /// [0, classes) throw.
  void add(const cv::Mat& prediction, const cv::Mat& label);
  void add(int label, int prediction, std::int64_t n = 1);

  int classes() const { return classes_; }
  std::int64_t at(int label, int prediction) const { return counts_[label * classes_ + prediction]; }
  std::int64_t total() const;
  std::int64_t true_positives(int c) const { return at(c, c); }
  std::int64_t false_positives(int c) const;
  std::int64_t false_negatives(int c) const;

 private:
  int classes_;
  std::vector<std::int64_t> counts_;
};

struct F1Report {
  std::vector<std::optional<double>> per_class;  // empty when absent from both prediction and label
  std::vector<int> macro_classes;                 // the classes averaged
  double macro_f1 = 0.0;

  Json to_json() const;
};

/// Per-class F1 = 2TP / (2TP + FP + FN) from the global matrix; the macro
/// average runs over `candidates` minus classes absent from both prediction
/// and label. Throws std::invalid_argument on an empty matrix.
F1Report evaluate_f1(const ConfusionMatrix& matrix, const std::vector<int>& candidates);

F1Report evaluate_f1(const std::vector<cv::Mat>& predictions, const std::vector<cv::Mat>& labels, int classes,
                     const std::vector<int>& candidates);

}  // namespace noisypairs::metrics
