#include "noisypairs/vts/layout.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>

#include "noisypairs/common/rng.hpp"

namespace noisypairs::vts {
namespace {
constexpr int kMaxAttempts = 32;
}

std::vector<int> VoronoiLayout::cell_pixel_counts() const {
  std::vector<int> counts(seeds.size(), 0);
  for (int c : cell_of) ++counts.at(c);
  return counts;
}

cv::Mat VoronoiLayout::class_label() const {
  cv::Mat label(image_size, image_size, CV_8UC1);
  for (int y = 0; y < image_size; ++y) {
    auto* row = label.ptr<std::uint8_t>(y);
    for (int x = 0; x < image_size; ++x) row[x] = static_cast<std::uint8_t>(class_of_cell[cell_at(x, y)]);
  }
  return label;
}

std::vector<int> assign_cells(int image_size, const std::vector<cv::Point>& seeds) {
  std::vector<int> cell_of(static_cast<std::size_t>(image_size) * image_size);
  for (int y = 0; y < image_size; ++y) {
    for (int x = 0; x < image_size; ++x) {
      long best = std::numeric_limits<long>::max();
      int best_cell = 0;
      for (int c = 0; c < static_cast<int>(seeds.size()); ++c) {
        const long dx = x - seeds[c].x;
        const long dy = y - seeds[c].y;
        const long d2 = dx * dx + dy * dy;
        if (d2 < best) {
          best = d2;
          best_cell = c;
        }
      }
      cell_of[static_cast<std::size_t>(y) * image_size + x] = best_cell;
    }
  }
  return cell_of;
}

VoronoiLayout generate_layout(int image_size, int n_cells, std::uint64_t seed) {
  if (n_cells < 2) throw std::invalid_argument("need at least 2 Voronoi cells");
  if (image_size < n_cells) {
    throw std::invalid_argument("image size " + std::to_string(image_size) + " is smaller than the cell count " +
                                std::to_string(n_cells));
  }
  Rng rng(seed);
  std::uniform_int_distribution<int> coord(0, image_size - 1);

  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    VoronoiLayout layout;
    layout.image_size = image_size;
    std::set<std::pair<int, int>> taken;
    while (static_cast<int>(layout.seeds.size()) < n_cells) {
      const int x = coord(rng);
      const int y = coord(rng);
      if (taken.emplace(x, y).second) layout.seeds.emplace_back(x, y);
    }
    layout.cell_of = assign_cells(image_size, layout.seeds);
    const auto counts = layout.cell_pixel_counts();
    if (*std::min_element(counts.begin(), counts.end()) == 0) continue;

    layout.class_of_cell.assign(n_cells, 1);
    std::fill_n(layout.class_of_cell.begin(), n_cells / 2, 0);
    std::shuffle(layout.class_of_cell.begin(), layout.class_of_cell.end(), rng);
    return layout;
  }
  throw std::runtime_error("could not sample a Voronoi layout without empty cells after " +
                           std::to_string(kMaxAttempts) + " attempts");
}

}  // namespace noisypairs::vts
