#include "noisypairs/losses/feature_map.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace noisypairs::losses {
namespace {

double norm_of(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) sum += x * x;
  return std::sqrt(sum);
}

void check_shape(int side, int channels, std::size_t size) {
  if (side <= 0 || channels <= 0) throw std::invalid_argument("feature map side and channels must be positive");
  if (size != static_cast<std::size_t>(side) * side * channels) {
    throw std::invalid_argument("feature map expects " + std::to_string(side * side * channels) +
                                " values, got " + std::to_string(size));
  }
}

}  // namespace

FeatureMap::FeatureMap(int side, int channels, std::vector<double> values)
    : side_(side), channels_(channels), values_(std::move(values)) {
  check_shape(side, channels, values_.size());
  if (max_norm_deviation() > kNormTolerance) {
    throw std::invalid_argument("feature map positions must be unit-normalized");
  }
}

FeatureMap FeatureMap::normalized(int side, int channels, std::vector<double> values) {
  check_shape(side, channels, values.size());
  for (int p = 0; p < side * side; ++p) {
    auto* row = values.data() + static_cast<std::size_t>(p) * channels;
    const double norm = norm_of({row, static_cast<std::size_t>(channels)});
    if (norm == 0.0) throw std::invalid_argument("cannot normalize a zero feature vector");
    for (int c = 0; c < channels; ++c) row[c] /= norm;
  }
  return FeatureMap(side, channels, std::move(values));
}

double FeatureMap::max_norm_deviation() const {
  double worst = 0.0;
  for (int p = 0; p < positions(); ++p) worst = std::max(worst, std::abs(norm_of(at(p)) - 1.0));
  return worst;
}

}  // namespace noisypairs::losses
