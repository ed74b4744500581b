#include "noisypairs/losses/label_grid.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>
#include <string>

namespace noisypairs::losses {

int DenseLabelGrid::count(int label) const {
  return static_cast<int>(std::count(classes.begin(), classes.end(), label));
}

DenseLabelGrid downsample_label(const LabelView& label, int side) {
  if (side <= 0) throw std::invalid_argument("grid side must be positive");
  if (label.height % side != 0 || label.width % side != 0) {
    throw std::invalid_argument("label " + std::to_string(label.height) + "x" +
                                std::to_string(label.width) + " not divisible into a " +
                                std::to_string(side) + "x" + std::to_string(side) + " grid");
  }
  if (label.pixels.size() != static_cast<std::size_t>(label.height) * label.width) {
    throw std::invalid_argument("label view size does not match its dimensions");
  }
  const int block_h = label.height / side;
  const int block_w = label.width / side;

  DenseLabelGrid grid{side, std::vector<int>(static_cast<std::size_t>(side) * side)};
  std::array<int, 256> histogram{};
  for (int gy = 0; gy < side; ++gy) {
    for (int gx = 0; gx < side; ++gx) {
      histogram.fill(0);
      for (int y = gy * block_h; y < (gy + 1) * block_h; ++y) {
        const auto* row = label.pixels.data() + static_cast<std::size_t>(y) * label.width;
        for (int x = gx * block_w; x < (gx + 1) * block_w; ++x) ++histogram[row[x]];
      }
      // max_element returns the first maximum: lowest class wins ties.
      grid.classes[gy * side + gx] =
          static_cast<int>(std::max_element(histogram.begin(), histogram.end()) - histogram.begin());
    }
  }
  return grid;
}

}  // namespace noisypairs::losses
