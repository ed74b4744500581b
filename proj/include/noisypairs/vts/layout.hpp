#pragma once

#include <cstdint>
#include <vector>

#include <opencv2/core.hpp>

namespace noisypairs::vts {

/// Voronoi partition of a square image into cells, each assigned to one of two
/// downstream classes.
struct VoronoiLayout {
  int image_size = 0;
  std::vector<cv::Point> seeds;     // pixel coordinates, one per cell
  std::vector<int> cell_of;         // row-major, image_size² entries in [0, n_cells)
  std::vector<int> class_of_cell;   // 0 or 1 per cell

  int n_cells() const { return static_cast<int>(seeds.size()); }
  int cell_at(int x, int y) const { return cell_of[static_cast<std::size_t>(y) * image_size + x]; }
  std::vector<int> cell_pixel_counts() const;
  /// Per-pixel class map (CV_8UC1) with values class_of_cell[cell_of[p]].
  cv::Mat class_label() const;
};

/// Assigns every pixel to its nearest seed (squared Euclidean distance, ties to
/// the lowest cell index).
std::vector<int> assign_cells(int image_size, const std::vector<cv::Point>& seeds);

/// Samples distinct seeds uniformly over the pixel grid, assigns pixels, and
/// splits cells into a random balanced two-class partition. Deterministic in
/// `seed`. Retries a bounded number of times if a cell ends up empty, then
/// throws std::runtime_error. Requires n_cells ≥ 2 and image_size ≥ n_cells.
VoronoiLayout generate_layout(int image_size, int n_cells, std::uint64_t seed);

}  // namespace noisypairs::vts
