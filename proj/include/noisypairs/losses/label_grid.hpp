#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace noisypairs::losses {

/// Class labels on the same d×d grid as a FeatureMap.
struct DenseLabelGrid {
  int side = 0;
  std::vector<int> classes;  // row-major, side*side entries

  int positions() const { return side * side; }
  /// Number of grid cells carrying `label`.
  int count(int label) const;
};

/// Read-only view of a full-resolution label map (row-major, one byte per pixel).
struct LabelView {
  int height = 0;
  int width = 0;
  std::span<const std::uint8_t> pixels;
};

/// Majority vote over each (H/d)×(W/d) block; ties go to the lowest class index.
/// Throws std::invalid_argument when H or W is not divisible by d.
DenseLabelGrid downsample_label(const LabelView& label, int side);

}  // namespace noisypairs::losses
