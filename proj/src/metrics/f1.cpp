#include "noisypairs/metrics/f1.hpp"

#include <numeric>
#include <stdexcept>
#include <string>

namespace noisypairs::metrics {

ConfusionMatrix::ConfusionMatrix(int classes) : classes_(classes) {
  if (classes < 1) throw std::invalid_argument("confusion matrix needs at least one class");
  counts_.assign(static_cast<std::size_t>(classes) * classes, 0);
}

void ConfusionMatrix::add(int label, int prediction, std::int64_t n) {
  if (label < 0 || label >= classes_ || prediction < 0 || prediction >= classes_) {
    throw std::invalid_argument("class index out of range: label " + std::to_string(label) + ", prediction " +
                                std::to_string(prediction));
  }
  counts_[label * classes_ + prediction] += n;
}

void ConfusionMatrix::add(const cv::Mat& prediction, const cv::Mat& label) {
  if (prediction.type() != CV_8UC1 || label.type() != CV_8UC1) throw std::invalid_argument("expected CV_8UC1 maps");
  if (prediction.size() != label.size()) throw std::invalid_argument("prediction and label sizes differ");
  for (int y = 0; y < label.rows; ++y) {
    const uchar* p = prediction.ptr<uchar>(y);
    const uchar* l = label.ptr<uchar>(y);
    for (int x = 0; x < label.cols; ++x) add(l[x], p[x]);
  }
}

std::int64_t ConfusionMatrix::total() const { return std::accumulate(counts_.begin(), counts_.end(), std::int64_t{0}); }

std::int64_t ConfusionMatrix::false_positives(int c) const {
  std::int64_t n = 0;
  for (int l = 0; l < classes_; ++l)
    if (l != c) n += at(l, c);
  return n;
}

std::int64_t ConfusionMatrix::false_negatives(int c) const {
  std::int64_t n = 0;
  for (int p = 0; p < classes_; ++p)
    if (p != c) n += at(c, p);
  return n;
}

Json F1Report::to_json() const {
  Json per = Json::array();
  for (const auto& f : per_class) per.push_back(f ? Json(*f) : Json(nullptr));
  return Json{{"per_class_f1", per}, {"macro_classes", macro_classes}, {"macro_f1", macro_f1}};
}

F1Report evaluate_f1(const ConfusionMatrix& m, const std::vector<int>& candidates) {
  if (m.total() == 0) throw std::invalid_argument("empty test set");
  F1Report r;
  for (int c = 0; c < m.classes(); ++c) {
    const auto tp = m.true_positives(c), fp = m.false_positives(c), fn = m.false_negatives(c);
    if (tp + fp + fn == 0) {
      r.per_class.emplace_back();
    } else {
      r.per_class.emplace_back(2.0 * tp / static_cast<double>(2 * tp + fp + fn));
    }
  }
  double sum = 0.0;
  for (int c : candidates) {
    if (c < 0 || c >= m.classes()) throw std::invalid_argument("macro class out of range");
    if (!r.per_class[c]) continue;
    r.macro_classes.push_back(c);
    sum += *r.per_class[c];
  }
  r.macro_f1 = r.macro_classes.empty() ? 0.0 : sum / static_cast<double>(r.macro_classes.size());
  return r;
}

F1Report evaluate_f1(const std::vector<cv::Mat>& predictions, const std::vector<cv::Mat>& labels, int classes,
                     const std::vector<int>& candidates) {
  if (predictions.size() != labels.size()) throw std::invalid_argument("prediction and label counts differ");
  ConfusionMatrix m(classes);
  for (std::size_t i = 0; i < labels.size(); ++i) m.add(predictions[i], labels[i]);
  return evaluate_f1(m, candidates);
}

}  // namespace noisypairs::metrics
