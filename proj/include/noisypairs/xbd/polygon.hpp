#pragma once

#include <string>
#include <vector>

#include <opencv2/core.hpp>

#include "noisypairs/common/json_io.hpp"

namespace noisypairs::xbd {

/// Damage grades as stored in class maps. 0 is background.
enum Grade : int { kBackground = 0, kNoDamage = 1, kMinorDamage = 2, kMajorDamage = 3, kDestroyed = 4 };
inline constexpr int kNumGrades = 5;

/// One building footprint. Rings are filled with the even-odd rule, so inner
/// rings cut holes.
struct BuildingPolygon {
  std::vector<std::vector<cv::Point2d>> rings;
  int grade = kNoDamage;
};

struct ParsedAnnotations {
  std::vector<BuildingPolygon> polygons;  // in file order
  int skipped = 0;                        // malformed records
};

/// Parses a WKT "POLYGON ((x y, ...), ...)" string. Returns false if malformed.
bool parse_wkt_polygon(const std::string& wkt, std::vector<std::vector<cv::Point2d>>& rings);

/// Grade for an xBD "subtype"; pre-disaster records without one are undamaged
/// buildings. Returns -1 for an unknown subtype.
int grade_from_subtype(const std::string& subtype);

/// Reads the pixel-space ("xy") building features of an xBD label file.
/// Malformed records are skipped and counted.
ParsedAnnotations parse_xbd_labels(const Json& label_file);

/// Rasterizes polygons into a CV_8UC1 class map: background 0, later polygons
/// overwrite earlier ones, a pixel is covered when its centre is inside.
/// Polygons are clipped to the image.
cv::Mat rasterize_labels(const std::vector<BuildingPolygon>& polygons, cv::Size size);

}  // namespace noisypairs::xbd
