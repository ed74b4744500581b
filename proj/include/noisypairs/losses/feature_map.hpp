#pragma once

#include <span>
#include <vector>

namespace noisypairs::losses {

/// Inputs to the losses may drift from unit length by this much (float storage,
/// finite-difference probes) before they are rejected.
inline constexpr double kNormTolerance = 1e-3;

/// A d×d grid of c-dimensional feature vectors, stored position-major
/// (values[p * channels + k]). Every position is a unit vector.
class FeatureMap {
 public:
  FeatureMap() = default;

  /// Takes ownership of already-normalized vectors; throws std::invalid_argument
  /// if a position deviates from unit length by more than kNormTolerance.
  FeatureMap(int side, int channels, std::vector<double> values);

  /// L2-normalizes each position of `values`.
  static FeatureMap normalized(int side, int channels, std::vector<double> values);

  int side() const { return side_; }
  int channels() const { return channels_; }
  int positions() const { return side_ * side_; }

  std::span<const double> at(int position) const {
    return {values_.data() + static_cast<std::size_t>(position) * channels_,
            static_cast<std::size_t>(channels_)};
  }
  const std::vector<double>& values() const { return values_; }

  /// Largest |‖f_p‖ − 1| over all positions.
  double max_norm_deviation() const;

 private:
  int side_ = 0;
  int channels_ = 0;
  std::vector<double> values_;
};

}  // namespace noisypairs::losses
